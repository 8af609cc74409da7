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

#include <unsupported/Eigen/KroneckerProduct>
#include <unsupported/Eigen/MatrixFunctions>

#include <cmath>
#include <stdexcept>
#include <string>

namespace dfsim {

Operator::Operator(Matrix m) : m_(std::move(m)) {
  if (m_.rows() != m_.cols()) {
    throw std::invalid_argument("Operator must be square");
  }
  if (!is_power_of_two(static_cast<std::size_t>(m_.rows()))) {
    throw std::invalid_argument("Operator dimension must be a power of two, got " +
                                std::to_string(m_.rows()));
  }
}

Operator Operator::identity(std::size_t dim) {
  return Operator(Matrix::Identity(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim)));
}

Operator Operator::zero(std::size_t dim) {
  return Operator(Matrix::Zero(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim)));
}

bool Operator::is_hermitian(double tol) const { return max_abs_diff(m_, m_.adjoint()) <= tol; }

bool Operator::is_unitary(double tol) const {
  return max_abs_diff(m_.adjoint() * m_, Matrix::Identity(m_.rows(), m_.cols())) <= tol;
}

Operator& Operator::operator+=(const Operator& o) {
  m_ += o.m_;
  return *this;
}

Operator& Operator::operator-=(const Operator& o) {
  m_ -= o.m_;
  return *this;
}

Operator& Operator::operator*=(Complex s) {
  m_ *= s;
  return *this;
}

Operator operator*(const Operator& a, const Operator& b) { return Operator(a.m_ * b.m_); }

Superoperator::Superoperator(Matrix m) : m_(std::move(m)) {
  if (m_.rows() != m_.cols()) {
    throw std::invalid_argument("Superoperator must be square");
  }
  const auto n = static_cast<std::size_t>(m_.rows());
  const auto root = static_cast<std::size_t>(std::llround(std::sqrt(static_cast<double>(n))));
  if (root * root != n) {
    throw std::invalid_argument("Superoperator dimension must be a perfect square, got " +
                                std::to_string(n));
  }
  hilbert_dim_ = root;
}

Superoperator Superoperator::identity(std::size_t hilbert_dim) {
  const auto n = static_cast<Eigen::Index>(hilbert_dim * hilbert_dim);
  return Superoperator(Matrix::Identity(n, n));
}

Superoperator Superoperator::zero(std::size_t hilbert_dim) {
  const auto n = static_cast<Eigen::Index>(hilbert_dim * hilbert_dim);
  return Superoperator(Matrix::Zero(n, n));
}

Operator Superoperator::apply(const Operator& rho) const {
  if (rho.dim() != hilbert_dim_) {
    throw std::invalid_argument("Superoperator::apply: dimension mismatch");
  }
  return unvec(m_ * vec(rho));
}

Superoperator& Superoperator::operator+=(const Superoperator& o) {
  m_ += o.m_;
  return *this;
}

Superoperator& Superoperator::operator-=(const Superoperator& o) {
  m_ -= o.m_;
  return *this;
}

Superoperator& Superoperator::operator*=(Complex s) {
  m_ *= s;
  return *this;
}

Superoperator operator*(const Superoperator& a, const Superoperator& b) {
  return Superoperator(a.m_ * b.m_);
}

bool is_power_of_two(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

double max_abs_diff(const Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw std::invalid_argument("max_abs_diff: shape mismatch");
  }
  if (a.size() == 0) return 0.0;
  return (a - b).cwiseAbs().maxCoeff();
}

double max_abs_diff(const Operator& a, const Operator& b) { return max_abs_diff(a.matrix(), b.matrix()); }

double max_abs_diff(const Superoperator& a, const Superoperator& b) {
  return max_abs_diff(a.matrix(), b.matrix());
}

Operator pauli_identity() { return Operator::identity(2); }

Operator pauli_x() {
  Matrix m(2, 2);
  m << 0.0, 1.0, 1.0, 0.0;
  return Operator(m);
}

Operator pauli_y() {
  Matrix m(2, 2);
  m << 0.0, -kI, kI, 0.0;
  return Operator(m);
}

Operator pauli_z() {
  Matrix m(2, 2);
  m << 1.0, 0.0, 0.0, -1.0;
  return Operator(m);
}

Operator tensor_product(const Operator& a, const Operator& b) {
  return Operator(Eigen::kroneckerProduct(a.matrix(), b.matrix()).eval());
}

Operator tensor_product(std::span<const Operator> factors) {
  if (factors.empty()) return Operator::identity(1);
  Operator out = factors.front();
  for (std::size_t i = 1; i < factors.size(); ++i) out = tensor_product(out, factors[i]);
  return out;
}

Operator embed(const Operator& single, std::size_t spin, std::size_t n_spins) {
  if (single.dim() != 2) throw std::invalid_argument("embed: expected a single-spin operator");
  if (spin >= n_spins) throw std::out_of_range("embed: spin index out of range");
  // Build left (x) single (x) right without materializing n_spins factors.
  const auto left = static_cast<Eigen::Index>(std::size_t{1} << spin);
  const auto right = static_cast<Eigen::Index>(std::size_t{1} << (n_spins - spin - 1));
  Matrix m = Eigen::kroneckerProduct(
      Eigen::kroneckerProduct(Matrix::Identity(left, left), single.matrix()).eval(),
      Matrix::Identity(right, right));
  return Operator(std::move(m));
}

Operator commutator(const Operator& a, const Operator& b) { return a * b - b * a; }

Operator evolve_unitary(const Operator& h, double t) {
  if (!h.is_hermitian(1e-10 * std::max(1.0, h.matrix().cwiseAbs().maxCoeff()))) {
    throw std::invalid_argument("evolve_unitary: generator is not Hermitian");
  }
  // Symmetrize so the solver sees an exactly Hermitian input.
  const Matrix herm = 0.5 * (h.matrix() + h.matrix().adjoint());
  Eigen::SelfAdjointEigenSolver<Matrix> eig(herm);
  const Matrix& v = eig.eigenvectors();
  Vector phases(v.cols());
  for (Eigen::Index k = 0; k < v.cols(); ++k) {
    phases(k) = std::exp(Complex(0.0, -eig.eigenvalues()(k) * t));
  }
  return Operator(v * phases.asDiagonal() * v.adjoint());
}

Superoperator commutator_superoperator(const Operator& z) {
  const auto d = static_cast<Eigen::Index>(z.dim());
  const Matrix id = Matrix::Identity(d, d);
  Matrix m = Eigen::kroneckerProduct(id, z.matrix()).eval() -
             Eigen::kroneckerProduct(z.matrix().transpose(), id).eval();
  return Superoperator(std::move(m));
}

Superoperator liouvillian(const Operator& h) {
  if (!h.is_hermitian(1e-10 * std::max(1.0, h.matrix().cwiseAbs().maxCoeff()))) {
    throw std::invalid_argument("liouvillian: generator is not Hermitian");
  }
  return commutator_superoperator(h);
}

Superoperator superpropagator(const Operator& u) {
  if (!u.is_unitary(1e-10)) throw std::invalid_argument("superpropagator: operator is not unitary");
  return Superoperator(Eigen::kroneckerProduct(u.matrix().conjugate(), u.matrix()).eval());
}

Vector vec(const Operator& rho) {
  const auto d = static_cast<Eigen::Index>(rho.dim());
  return Eigen::Map<const Vector>(rho.matrix().data(), d * d);
}

Operator unvec(const Vector& v) {
  const auto d = static_cast<Eigen::Index>(std::llround(std::sqrt(static_cast<double>(v.size()))));
  if (d * d != v.size()) throw std::invalid_argument("unvec: length is not a perfect square");
  return Operator(Eigen::Map<const Matrix>(v.data(), d, d));
}

Superoperator expm(const Superoperator& s) { return Superoperator(s.matrix().exp()); }

Complex hs_inner(const Operator& a, const Operator& b) {
  return (a.matrix().adjoint() * b.matrix()).trace();
}

}  // namespace dfsim
