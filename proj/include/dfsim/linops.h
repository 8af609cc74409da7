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

#ifndef DFSIM_LINOPS_H
#define DFSIM_LINOPS_H

#include <Eigen/Dense>

#include <complex>
#include <cstddef>
#include <span>

namespace dfsim {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr Complex kI{0.0, 1.0};

/// Dense operator on the Hilbert space of n spin-1/2 particles.
///
/// Basis states are ordered |s_1 ... s_n> with spin 1 the most significant
/// bit, so index = sum_i s_i 2^(n-1-i). The dimension is always a power of two.
class Operator {
 public:
  Operator() = default;
  explicit Operator(Matrix m);

  static Operator identity(std::size_t dim);
  static Operator zero(std::size_t dim);

  std::size_t dim() const { return static_cast<std::size_t>(m_.rows()); }
  const Matrix& matrix() const { return m_; }
  Complex operator()(std::size_t r, std::size_t c) const { return m_(r, c); }

  Operator adjoint() const { return Operator(m_.adjoint()); }
  Complex trace() const { return m_.trace(); }

  bool is_hermitian(double tol = 1e-12) const;
  bool is_unitary(double tol = 1e-12) const;

  Operator& operator+=(const Operator& o);
  Operator& operator-=(const Operator& o);
  Operator& operator*=(Complex s);

  friend Operator operator+(Operator a, const Operator& b) { return a += b; }
  friend Operator operator-(Operator a, const Operator& b) { return a -= b; }
  friend Operator operator*(const Operator& a, const Operator& b);
  friend Operator operator*(Complex s, Operator a) { return a *= s; }
  friend Operator operator*(double s, Operator a) { return a *= Complex(s, 0.0); }

 private:
  Matrix m_;
};

/// Linear map on vectorized operators.
///
/// Vectorization stacks columns: vec(rho)[i + d*j] = rho(i, j). Under this
/// convention vec(A X B) = (B^T (x) A) vec(X), so the conjugation map
/// rho -> U rho U^dag is conj(U) (x) U and the commutator generator is
/// 1 (x) H - H^T (x) 1, giving exp(-i L t) = conj(U) (x) U for U = exp(-i H t).
class Superoperator {
 public:
  Superoperator() = default;
  explicit Superoperator(Matrix m);

  static Superoperator identity(std::size_t hilbert_dim);
  static Superoperator zero(std::size_t hilbert_dim);

  /// Dimension of the Liouville space (square of the Hilbert dimension).
  std::size_t dim() const { return static_cast<std::size_t>(m_.rows()); }
  std::size_t hilbert_dim() const { return hilbert_dim_; }
  const Matrix& matrix() const { return m_; }
  Complex trace() const { return m_.trace(); }
  Superoperator adjoint() const { return Superoperator(m_.adjoint()); }

  Operator apply(const Operator& rho) const;

  Superoperator& operator+=(const Superoperator& o);
  Superoperator& operator-=(const Superoperator& o);
  Superoperator& operator*=(Complex s);

  friend Superoperator operator+(Superoperator a, const Superoperator& b) { return a += b; }
  friend Superoperator operator-(Superoperator a, const Superoperator& b) { return a -= b; }
  friend Superoperator operator*(const Superoperator& a, const Superoperator& b);
  friend Superoperator operator*(Complex s, Superoperator a) { return a *= s; }
  friend Superoperator operator*(double s, Superoperator a) { return a *= Complex(s, 0.0); }

 private:
  Matrix m_;
  std::size_t hilbert_dim_ = 0;
};

bool is_power_of_two(std::size_t n);

/// Maximum absolute entry of a - b.
double max_abs_diff(const Matrix& a, const Matrix& b);
double max_abs_diff(const Operator& a, const Operator& b);
double max_abs_diff(const Superoperator& a, const Superoperator& b);

// Single-spin Pauli matrices and identity.
Operator pauli_identity();
Operator pauli_x();
Operator pauli_y();
Operator pauli_z();

Operator tensor_product(const Operator& a, const Operator& b);
Operator tensor_product(std::span<const Operator> factors);

/// `single` acting on spin `spin` (0-based) of an n-spin register.
Operator embed(const Operator& single, std::size_t spin, std::size_t n_spins);

Operator commutator(const Operator& a, const Operator& b);

/// exp(-i h t) for Hermitian h, via Hermitian eigendecomposition.
/// Throws std::invalid_argument if h is not Hermitian.
Operator evolve_unitary(const Operator& h, double t);

/// Commutator generator L with L vec(rho) = vec([h, rho]).
Superoperator liouvillian(const Operator& h);

/// 1 (x) z - z^T (x) 1 for any z; liouvillian() without the Hermitian check.
Superoperator commutator_superoperator(const Operator& z);

/// conj(u) (x) u. Throws std::invalid_argument if u is not unitary.
Superoperator superpropagator(const Operator& u);

Vector vec(const Operator& rho);
Operator unvec(const Vector& v);

/// General matrix exponential exp(s) (scaling and squaring), for
/// non-Hermitian generators such as Lindblad or cumulant exponents.
Superoperator expm(const Superoperator& s);

/// Hilbert-Schmidt inner product Tr(a^dag b).
Complex hs_inner(const Operator& a, const Operator& b);

}  // namespace dfsim

#endif  // DFSIM_LINOPS_H
