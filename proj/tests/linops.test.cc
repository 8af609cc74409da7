// Copyright 2026 The dfsim Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "dfsim/linops.h"

#include <gtest/gtest.h>

#include <random>
#include <unsupported/Eigen/KroneckerProduct>
#include <unsupported/Eigen/MatrixFunctions>

using namespace dfsim;

namespace {

Operator random_hermitian(std::size_t d, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  Matrix m(d, d);
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) m(i, j) = Complex(g(rng), g(rng));
  }
  return Operator(Matrix(0.5 * (m + m.adjoint())));
}

Operator random_unitary(std::size_t d, std::uint64_t seed) {
  return evolve_unitary(random_hermitian(d, seed), 1.0);
}

}  // namespace

TEST(linops, operator_rejects_non_power_of_two) {
  EXPECT_THROW(Operator(Matrix::Identity(3, 3)), std::invalid_argument);
  EXPECT_THROW(Operator(Matrix::Zero(2, 4)), std::invalid_argument);
  EXPECT_NO_THROW(Operator(Matrix::Identity(8, 8)));
}

TEST(linops, superoperator_rejects_non_square_dimension) {
  EXPECT_THROW(Superoperator(Matrix::Identity(8, 8)), std::invalid_argument);
  EXPECT_EQ(Superoperator::identity(4).dim(), 16u);
  EXPECT_EQ(Superoperator::identity(4).hilbert_dim(), 4u);
}

TEST(linops, pauli_algebra) {
  const Operator x = pauli_x(), y = pauli_y(), z = pauli_z();
  EXPECT_LT(max_abs_diff(x * y, Complex(0, 1) * z), 1e-15);
  EXPECT_LT(max_abs_diff(commutator(x, y), Complex(0, 2) * z), 1e-15);
  EXPECT_LT(max_abs_diff(x * x, pauli_identity()), 1e-15);
}

TEST(linops, tensor_ordering_first_factor_most_significant) {
  // sz on spin 0 of two: diag(1, 1, -1, -1).
  const Operator z0 = embed(pauli_z(), 0, 2);
  EXPECT_NEAR(z0(0, 0).real(), 1.0, 0.0);
  EXPECT_NEAR(z0(1, 1).real(), 1.0, 0.0);
  EXPECT_NEAR(z0(2, 2).real(), -1.0, 0.0);
  const Operator ops[] = {pauli_x(), pauli_z(), pauli_identity()};
  const Operator t = tensor_product(ops);
  EXPECT_EQ(t.dim(), 8u);
  EXPECT_LT(max_abs_diff(t, embed(pauli_x(), 0, 3) * embed(pauli_z(), 1, 3)), 1e-15);
}

TEST(linops, evolve_unitary_matches_general_exponential) {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const Operator h = random_hermitian(8, seed);
    const Operator u = evolve_unitary(h, 0.7);
    const Matrix ref = (Complex(0, -0.7) * h.matrix()).exp();
    EXPECT_LT(max_abs_diff(u.matrix(), ref), 1e-12);
    EXPECT_TRUE(u.is_unitary(1e-12));
  }
}

TEST(linops, evolve_unitary_rejects_non_hermitian) {
  Matrix m = Matrix::Zero(2, 2);
  m(0, 1) = 1.0;
  EXPECT_THROW(evolve_unitary(Operator(m), 1.0), std::invalid_argument);
}

TEST(linops, vectorization_identities) {
  const Operator a = random_hermitian(4, 11), b = random_hermitian(4, 12), x = random_hermitian(4, 13);
  // vec(A X B) = (B^T (x) A) vec(X)
  const Matrix kron = Eigen::kroneckerProduct(b.matrix().transpose(), a.matrix());
  EXPECT_LT((vec(a * x * b) - kron * vec(x)).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_EQ(max_abs_diff(unvec(vec(x)), x), 0.0);
  EXPECT_EQ(vec(x)(1), x(1, 0));
}

TEST(linops, liouvillian_generates_superpropagator) {
  const Operator h = random_hermitian(4, 21);
  const double t = 0.37;
  const Superoperator lhs = expm(Complex(0, -t) * liouvillian(h));
  const Superoperator rhs = superpropagator(evolve_unitary(h, t));
  EXPECT_LT(max_abs_diff(lhs, rhs), 1e-11);
  const Operator rho = random_hermitian(4, 22);
  EXPECT_LT(max_abs_diff(liouvillian(h).apply(rho), commutator(h, rho)), 1e-12);
}

TEST(linops, superpropagator_conjugates) {
  const Operator u = random_unitary(4, 31), rho = random_hermitian(4, 32);
  EXPECT_LT(max_abs_diff(superpropagator(u).apply(rho), u * rho * u.adjoint()), 1e-12);
  EXPECT_THROW(superpropagator(2.0 * u), std::invalid_argument);
  // Composition: S(UV) = S(U) S(V).
  const Operator v = random_unitary(4, 33);
  EXPECT_LT(max_abs_diff(superpropagator(u * v), superpropagator(u) * superpropagator(v)), 1e-12);
}

TEST(linops, hs_inner_and_trace) {
  const Operator a = random_hermitian(4, 41), b = random_hermitian(4, 42);
  EXPECT_NEAR(std::abs(hs_inner(a, b) - (a.adjoint() * b).trace()), 0.0, 1e-12);
  EXPECT_NEAR(hs_inner(pauli_x(), pauli_z()).real(), 0.0, 0.0);
  EXPECT_NEAR(hs_inner(pauli_x(), pauli_x()).real(), 2.0, 0.0);
}
