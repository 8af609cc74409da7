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

#include "dfsim/cumulant.h"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace dfsim {

namespace {

void check_closed_form_args(double strength, double tau_c, std::size_t n, double tau) {
  if (!(strength >= 0.0)) throw std::invalid_argument("noise strength must be non-negative");
  if (!(tau_c > 0.0)) throw std::invalid_argument("tau_c must be positive");
  if (n == 0) throw std::invalid_argument("cycle count must be positive");
  if (!(tau > 0.0)) throw std::invalid_argument("tau must be positive");
}

// x + exp(-x) - 1 without cancellation.
double x_plus_expm1(double x) {
  if (x < 1e-4) return x * x * (0.5 - x * (1.0 / 6.0 - x / 24.0));
  return x + std::expm1(-x);
}

// 1 - exp(-x).
double one_minus_exp(double x) { return -std::expm1(-x); }

// Returns +1 / -1 if a == +/- b to tolerance, 0 otherwise.
int sign_match(const Operator& a, const Operator& b, double tol) {
  if (max_abs_diff(a, b) <= tol) return 1;
  if (max_abs_diff(a, -1.0 * b) <= tol) return -1;
  return 0;
}

}  // namespace

double cp_zeta(double strength, double tau_c, std::size_t n, double tau) {
  check_closed_form_args(strength, tau_c, n, tau);
  const double x = tau / tau_c;
  const double nn = static_cast<double>(n);
  double bracket = 0.0;
  if (nn * x < 1e-3) {
    // Leading terms cancel; use the Taylor expansion in x.
    const double x3 = x * x * x;
    bracket = x3 * (2.0 * nn / 3.0 - nn * nn * x / 2.0 + (nn * nn * nn / 3.0 - nn / 10.0) * x * x +
                    (nn * nn / 12.0 - nn * nn * nn * nn / 6.0) * x * x * x);
  } else {
    const double q = std::exp(-x);
    const double th = std::tanh(x / 2.0);  // (1 - q) / (1 + q)
    bracket = 2.0 * nn * x_plus_expm1(x) + th * th * (1.0 - 2.0 * nn * (1.0 + q) - std::exp(-2.0 * nn * x));
  }
  const double t = 2.0 * nn * tau;
  return 2.0 * strength * strength * tau_c * tau_c / (t * t) * bracket;
}

double cp_fidelity(double zeta, std::size_t n, double tau) {
  if (!(zeta >= 0.0)) throw std::invalid_argument("cp_fidelity: zeta must be non-negative");
  const double s = zeta * static_cast<double>(n * n) * tau * tau;
  return (3.0 + 4.0 * std::exp(-2.0 * s) + std::exp(-8.0 * s)) / 8.0;
}

TsZetas ts_zetas(double strength, double tau_c, std::size_t n, double tau) {
  check_closed_form_args(strength, tau_c, n, tau);
  const double x = tau / tau_c;
  const double nn = static_cast<double>(n);
  const double q = std::exp(-x);
  const double scale = strength * strength * tau_c * tau_c;
  const double a = scale * x_plus_expm1(x);
  const double omq = one_minus_exp(x);         // 1 - q
  const double omq2 = one_minus_exp(2.0 * x);  // 1 - q^2
  const double omq4 = one_minus_exp(4.0 * x);  // 1 - q^4
  // Bbar q^m with Bbar = scale (1 - q)^2 / q.
  const double bq = scale * omq * omq;  // Bbar * q

  // sum_{d=1}^{n-1} (n - d) r^(d-1), r = q^4.
  double s = 0.0;
  if (omq4 < 1e-3) {
    const double r = q * q * q * q;
    double rp = 1.0;
    for (std::size_t d = 1; d < n; ++d) {
      s += static_cast<double>(n - d) * rp;
      rp *= r;
    }
  } else {
    s = (nn * omq4 - one_minus_exp(4.0 * nn * x)) / (omq4 * omq4);
  }

  const double total = 4.0 * nn * tau;
  const double pref = 2.0 / (total * total);
  TsZetas z;
  // Diagonal blocks: 2A per generator per cycle, minus the (1,3) / (2,4)
  // cross term Bbar q^2; cross-cycle squares scale by q^(4(d-1)).
  z.zeta1 = pref * (nn * (2.0 * a - bq * q) - bq * q * omq2 * omq2 * s);
  z.zeta2 = pref * (nn * bq * omq2 - bq * omq2 * omq4 * s);
  return z;
}

TsZetas ts_zetas_printed(double strength, double tau_c, std::size_t n, double tau) {
  check_closed_form_args(strength, tau_c, n, tau);
  const double x = tau / tau_c;
  const double nn = static_cast<double>(n);
  const double q = std::exp(-x);
  const double q2 = q * q;
  const double q4 = q2 * q2;
  const double q4n = std::exp(-4.0 * nn * x);
  const double q4n_m4 = std::exp(-4.0 * (nn - 1.0) * x);
  const double omq = one_minus_exp(x);
  const double pref = strength * strength * tau_c * tau_c / (16.0 * nn * nn * tau * tau);
  // ((1 - e^x) / (1 + e^{2x}))^2 e^{-3x} = q^5 (1 - q)^2 / (1 + q^2)^2
  const double ratio = q * omq / (1.0 + q2);
  const double first = ratio * ratio * q * q2 * (nn * q4n_m4 - (nn - 1.0) * q4n - 1.0);
  const double rest = 2.0 * nn * x + nn * (q2 - 1.0) * (2.0 - q);
  TsZetas z;
  z.zeta1 = pref * (first + rest);
  // (1 - e^x)^2 e^{-4x} / (1 + e^{2x}) [e^{-4nx}(n e^{4x} - n + 1) + n e^{4x} - (n + 1)]
  //   = (1 - q)^2 / (1 + q^2) [q^4 (n q^{4n-4} - (n-1) q^{4n} - (n+1)) + n]
  z.zeta2 = pref * omq * omq / (1.0 + q2) * (q4 * (nn * q4n_m4 - (nn - 1.0) * q4n - (nn + 1.0)) + nn);
  return z;
}

double ts_fidelity(double zeta1, double zeta2, std::size_t n, double tau) {
  const double t = 4.0 * static_cast<double>(n) * tau;
  const double a = zeta1 * t * t;
  const double b = std::abs(zeta2 * t * t / 2.0);
  // 0.5 e^{-a} cosh(a) + 0.5 e^{-a} cosh(b), each written without overflow.
  return 0.25 * (1.0 + std::exp(-2.0 * a)) + 0.25 * (std::exp(b - a) + std::exp(-b - a));
}

double ou_triangle_integral(const OuParams& noise, double length) {
  const double s2 = noise.strength * noise.strength;
  if (std::isinf(noise.tau_c)) return s2 * length * length / 2.0;
  return s2 * noise.tau_c * noise.tau_c * x_plus_expm1(length / noise.tau_c);
}

double ou_rectangle_integral(const OuParams& noise, double length_late, double length_early, double gap) {
  const double s2 = noise.strength * noise.strength;
  if (std::isinf(noise.tau_c)) return s2 * length_late * length_early;
  const double tc = noise.tau_c;
  return s2 * tc * tc * std::exp(-gap / tc) * one_minus_exp(length_late / tc) * one_minus_exp(length_early / tc);
}

double CumulantResult::pair_coefficient(std::size_t a, std::size_t b) const {
  const auto ia = static_cast<Eigen::Index>(a);
  const auto ib = static_cast<Eigen::Index>(b);
  if (ia >= coefficients.rows() || ib >= coefficients.rows()) {
    throw std::out_of_range("pair_coefficient: generator index out of range");
  }
  return a == b ? coefficients(ia, ia) : coefficients(ia, ib) + coefficients(ib, ia);
}

CumulantResult numeric_second_cumulant(const std::vector<TogglingInterval>& intervals, const OuParams& noise) {
  if (intervals.empty()) throw std::invalid_argument("numeric_second_cumulant: no intervals");
  const std::size_t d = intervals.front().noise_generator.dim();
  const double t = intervals.back().end - intervals.front().start;
  if (!(t > 0.0)) throw std::invalid_argument("numeric_second_cumulant: zero total duration");

  CumulantResult out;
  out.duration = t;

  // Classify each interval's generator as +/- a distinct generator (or zero).
  std::vector<std::size_t> label(intervals.size(), 0);
  std::vector<int> sign(intervals.size(), 0);
  for (std::size_t i = 0; i < intervals.size(); ++i) {
    const Operator& z = intervals[i].noise_generator;
    const double scale = std::max(1.0, z.matrix().cwiseAbs().maxCoeff());
    if (z.matrix().cwiseAbs().maxCoeff() <= 1e-14) continue;
    bool found = false;
    for (std::size_t g = 0; g < out.generators.size() && !found; ++g) {
      if (int s = sign_match(z, out.generators[g], 1e-12 * scale); s != 0) {
        label[i] = g;
        sign[i] = s;
        found = true;
      }
    }
    if (!found) {
      label[i] = out.generators.size();
      sign[i] = 1;
      out.generators.push_back(z);
    }
  }

  const auto ng = static_cast<Eigen::Index>(out.generators.size());
  Eigen::MatrixXd c = Eigen::MatrixXd::Zero(ng, ng);
  for (std::size_t i = 0; i < intervals.size(); ++i) {
    if (sign[i] == 0) continue;
    const auto gi = static_cast<Eigen::Index>(label[i]);
    c(gi, gi) += ou_triangle_integral(noise, intervals[i].length());
    for (std::size_t j = 0; j < i; ++j) {
      if (sign[j] == 0) continue;
      const double w = ou_rectangle_integral(noise, intervals[i].length(), intervals[j].length(),
                                             intervals[i].start - intervals[j].end);
      c(gi, static_cast<Eigen::Index>(label[j])) += sign[i] * sign[j] * w;
    }
  }
  out.coefficients = (2.0 / (t * t)) * c;

  std::vector<Superoperator> lifted;
  lifted.reserve(out.generators.size());
  for (const auto& z : out.generators) lifted.push_back(commutator_superoperator(z));
  out.k2 = Superoperator::zero(d);
  for (Eigen::Index a = 0; a < ng; ++a) {
    for (Eigen::Index b = 0; b < ng; ++b) {
      if (out.coefficients(a, b) == 0.0) continue;
      out.k2 += out.coefficients(a, b) * (lifted[static_cast<std::size_t>(a)] * lifted[static_cast<std::size_t>(b)]);
    }
  }

  std::vector<Superoperator> det;
  det.reserve(intervals.size());
  out.k1 = Superoperator::zero(d);
  for (const auto& iv : intervals) {
    det.push_back(liouvillian(iv.hamiltonian));
    out.k1 += (iv.length() / t) * det.back();
  }
  out.k2_det = Superoperator::zero(d);
  for (std::size_t i = 0; i < intervals.size(); ++i) {
    for (std::size_t j = 0; j < i; ++j) {
      const double w = intervals[i].length() * intervals[j].length() / (t * t);
      out.k2_det += w * (det[i] * det[j] - det[j] * det[i]);
    }
  }
  return out;
}

double fidelity_from_k2(const Superoperator& k2, double duration, const Superoperator& ideal) {
  if (k2.dim() != ideal.dim()) throw std::invalid_argument("fidelity_from_k2: dimension mismatch");
  Eigen::FullPivLU<Matrix> lu(ideal.matrix());
  if (!lu.isInvertible()) throw std::invalid_argument("fidelity_from_k2: ideal map is singular");
  const Superoperator attenuation = expm(-0.5 * duration * duration * k2);
  const Matrix noisy = ideal.matrix() * attenuation.matrix();
  const double d2 = static_cast<double>(k2.dim());
  return (lu.solve(noisy)).trace().real() / d2;
}

}  // namespace dfsim
