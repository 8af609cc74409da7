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

#include <gtest/gtest.h>

#include <Eigen/Eigenvalues>
#include <cmath>
#include <limits>

using namespace dfsim;

namespace {

const SpinSystem kTwoSpin = SpinSystem::two_spin(2 * kPi * 600, 50);

CumulantResult cp_cumulant(std::size_t n, double tau, const OuParams& p) {
  const auto cs = compile(build_cp(n, tau), kTwoSpin, noise_generator(kTwoSpin), CouplingForm::kWeak);
  return numeric_second_cumulant(cs.intervals, p);
}

CumulantResult ts_cumulant(std::size_t n, double tau, const OuParams& p) {
  const auto cs = compile(build_ts(n, tau), kTwoSpin, noise_generator(kTwoSpin), CouplingForm::kWeak);
  return numeric_second_cumulant(cs.intervals, p);
}

double rel(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

// Verbatim transcription of the published TS closed forms, valid while
// exp(4 n tau / tau_c) does not overflow.
TsZetas ts_printed_naive(double w, double tc, double n, double tau) {
  const double x = tau / tc;
  const double pre = w * w * tc * tc / (16 * n * n * tau * tau);
  const double r = (1 - std::exp(x)) / (1 + std::exp(2 * x));
  const double z1 = pre * (r * r * (std::exp(-4 * n * x) * (n * std::exp(4 * x) - n + 1) - 1) * std::exp(-3 * x) +
                           2 * n * x + n * (std::exp(-2 * x) - 1) * (2 - std::exp(-x)));
  const double z2 = pre * std::pow(1 - std::exp(x), 2) * std::exp(-4 * x) / (1 + std::exp(2 * x)) *
                    (std::exp(-4 * n * x) * (n * std::exp(4 * x) - n + 1) + n * std::exp(4 * x) - (n + 1));
  return {z1, z2};
}

}  // namespace

TEST(cumulant, cp_zeta_reference_value) {
  // High-precision quadrature of the interval-pair double integral.
  EXPECT_LT(rel(cp_zeta(1.0, 1.0, 2, 0.5), 0.046258872268584567), 1e-12);
  EXPECT_LT(rel(cp_cumulant(2, 0.5, {1.0, 1.0}).pair_coefficient(0, 0), 0.046258872268584567), 1e-12);
}

TEST(cumulant, ts_zetas_reference_values) {
  const TsZetas a = ts_zetas(1.0, 1.0, 4, 0.25);
  EXPECT_LT(rel(a.zeta1, 0.0068930839623169533), 1e-12);
  EXPECT_LT(rel(a.zeta2, 0.0037373178711570273), 1e-12);
  const TsZetas b = ts_zetas(1.0, 0.7, 1, 0.5);
  EXPECT_LT(rel(b.zeta1, 0.068623518754832216), 1e-12);
  EXPECT_LT(rel(b.zeta2, 0.048539986482709597), 1e-12);
}

TEST(cumulant, single_interval_coefficient) {
  TogglingInterval iv{0.0, 0.3, noise_generator(kTwoSpin), Operator::zero(4)};
  const auto r = numeric_second_cumulant({iv}, OuParams{2.0, 0.2});
  ASSERT_EQ(r.generators.size(), 1u);
  EXPECT_LT(rel(r.pair_coefficient(0, 0), 2.5711294583055283), 1e-12);
  const double x = 0.3 / 0.2;
  const double a = 4.0 * 0.04 * (std::exp(-x) + x - 1);
  EXPECT_LT(rel(r.pair_coefficient(0, 0), 2 * a / (0.3 * 0.3)), 1e-12);
}

TEST(cumulant, closed_forms_match_numeric_on_grid) {
  for (std::size_t n : {1, 2, 4, 8}) {
    for (double x : {0.01, 0.1, 1.0, 10.0}) {
      const double tau = 0.5, tc = tau / x;
      const OuParams p{1.3, tc};
      EXPECT_LT(rel(cp_cumulant(n, tau, p).pair_coefficient(0, 0), cp_zeta(1.3, tc, n, tau)), 1e-8);
      const auto r = ts_cumulant(n, tau, p);
      const TsZetas z = ts_zetas(1.3, tc, n, tau);
      EXPECT_LT(rel(r.pair_coefficient(0, 0), z.zeta1), 1e-8);
      EXPECT_LT(rel(r.pair_coefficient(1, 1), z.zeta1), 1e-8);
      EXPECT_LT(rel(r.pair_coefficient(0, 1), z.zeta2), 1e-8);
    }
  }
}

TEST(cumulant, ts_first_cycle_assembly) {
  // One cycle: four intervals +B1, +B2, -B1, -B2 of length tau.
  const double w = 1.1, tc = 0.6, tau = 0.4;
  const double x = tau / tc, q = std::exp(-x);
  const double a = w * w * tc * tc * (x + q - 1);
  const double bbar = w * w * tc * tc * (1 - q) * (1 - q) / q;
  const double t = 4 * tau;
  const TsZetas z = ts_zetas(w, tc, 1, tau);
  EXPECT_LT(rel(z.zeta1, 2 / (t * t) * (2 * a - bbar * q * q)), 1e-12);
  EXPECT_LT(rel(z.zeta2, 2 / (t * t) * bbar * q * (1 - q * q)), 1e-12);
}

TEST(cumulant, printed_ts_forms) {
  for (double n : {1.0, 2.0, 5.0}) {
    for (double x : {0.05, 0.5, 3.0}) {
      const TsZetas safe = ts_zetas_printed(1.0, 1.0, static_cast<std::size_t>(n), x);
      const TsZetas naive = ts_printed_naive(1.0, 1.0, n, x);
      EXPECT_LT(rel(safe.zeta1, naive.zeta1), 1e-9);
      EXPECT_LT(rel(safe.zeta2, naive.zeta2), 1e-9);
    }
  }
  // No overflow far beyond exp's range.
  const TsZetas big = ts_zetas_printed(1.0, 1e-3, 8, 10.0);
  EXPECT_TRUE(std::isfinite(big.zeta1) && std::isfinite(big.zeta2));
  // A single cycle differs from the pair sum by exactly a factor 2.
  const TsZetas p1 = ts_zetas_printed(1.0, 0.7, 1, 0.5), c1 = ts_zetas(1.0, 0.7, 1, 0.5);
  EXPECT_LT(rel(2 * p1.zeta1, c1.zeta1), 1e-12);
  EXPECT_LT(rel(2 * p1.zeta2, c1.zeta2), 1e-12);
}

TEST(cumulant, zeta_limits) {
  EXPECT_EQ(cp_zeta(0.0, 1.0, 3, 0.2), 0.0);
  EXPECT_EQ(ts_zetas(0.0, 1.0, 3, 0.2).zeta1, 0.0);
  EXPECT_EQ(ts_zetas(0.0, 1.0, 3, 0.2).zeta2, 0.0);
  double prev = std::numeric_limits<double>::infinity();
  for (double x : {1e-1, 1e-2, 1e-3, 1e-4, 1e-5, 1e-6}) {
    const double z = cp_zeta(1.0, 1.0, 2, x);
    EXPECT_GE(z, 0.0);
    EXPECT_LT(z, prev);
    prev = z;
  }
  EXPECT_LT(prev, 1e-5);
  // Motional narrowing: zeta ~ 1 / (tau / tau_c) at fixed strength.
  EXPECT_LT(cp_zeta(1.0, 1e-6, 2, 1.0), 1e-5);
  EXPECT_TRUE(std::isfinite(cp_zeta(1.0, 1e-9, 2, 1e3)));
}

TEST(cumulant, cp_zeta_series_branch_is_continuous) {
  for (std::size_t n : {1, 3, 10}) {
    const double x0 = 1e-3 / static_cast<double>(n);
    const double below = cp_zeta(1.0, 1.0, n, x0 * (1 - 1e-9));
    const double above = cp_zeta(1.0, 1.0, n, x0 * (1 + 1e-9));
    EXPECT_LT(rel(below, above), 1e-7);
    // Against the pair sum, which has no cancellation for tiny intervals.
    EXPECT_LT(rel(cp_zeta(1.0, 1.0, n, x0 / 7), cp_cumulant(n, x0 / 7, {1.0, 1.0}).pair_coefficient(0, 0)), 1e-8);
  }
}

TEST(cumulant, zeta_decreases_with_more_pulses_at_fixed_time) {
  for (double tc : {0.01, 0.1, 1.0, 10.0}) {
    double prev = std::numeric_limits<double>::infinity();
    for (std::size_t n : {1, 2, 4, 8, 16}) {
      const double z = cp_zeta(1.0, tc, n, 4.0 / (2.0 * n));
      EXPECT_LE(z, prev * (1 + 1e-12));
      prev = z;
    }
  }
}

TEST(cumulant, cp_fidelity_values) {
  EXPECT_DOUBLE_EQ(cp_fidelity(0.0, 4, 0.5), 1.0);
  EXPECT_NEAR(cp_fidelity(1e6, 4, 0.5), 3.0 / 8.0, 1e-15);
  EXPECT_THROW(cp_fidelity(-1.0, 1, 1.0), std::invalid_argument);
  double prev = 1.0;
  for (double z : {0.001, 0.01, 0.1, 1.0}) {
    const double f = cp_fidelity(z, 2, 0.5);
    EXPECT_LE(f, prev);
    prev = f;
  }
}

TEST(cumulant, cp_fidelity_from_generator_spectrum) {
  // Eigenvalues of the commutator map of collective X are differences of
  // X eigenvalues {1, 0, 0, -1}.
  const Superoperator zx = commutator_superoperator(collective_x(2));
  Eigen::SelfAdjointEigenSolver<Matrix> es(zx.matrix());
  int m0 = 0, m1 = 0, m2 = 0;
  for (double e : es.eigenvalues()) {
    const double a = std::abs(e);
    (a < 1e-9 ? m0 : (std::abs(a - 1) < 1e-9 ? m1 : m2))++;
  }
  EXPECT_EQ(m0, 6);
  EXPECT_EQ(m1, 8);
  EXPECT_EQ(m2, 2);
  const double zeta = 0.037, tau = 0.3;
  const std::size_t n = 3;
  const double s = zeta * n * n * tau * tau;
  EXPECT_NEAR((6 + 8 * std::exp(-2 * s) + 2 * std::exp(-8 * s)) / 16, cp_fidelity(zeta, n, tau), 1e-15);
}

TEST(cumulant, ts_fidelity_values) {
  EXPECT_DOUBLE_EQ(ts_fidelity(0.0, 0.0, 2, 0.1), 1.0);
  const double z1 = 0.02, n = 3, tau = 0.2, x = z1 * std::pow(4 * n * tau, 2);
  EXPECT_NEAR(ts_fidelity(z1, 0.0, 3, tau), 0.5 * std::exp(-x) * (std::cosh(x) + 1), 1e-15);
  EXPECT_TRUE(std::isfinite(ts_fidelity(1e6, 1e6, 8, 1.0)));
}

TEST(cumulant, ts_fidelity_matches_superoperator_trace) {
  const Superoperator c1 = commutator_superoperator(collective_z(2));
  const Superoperator c2 = commutator_superoperator(0.5 * (embed(pauli_z(), 1, 2) - embed(pauli_z(), 0, 2)));
  const double z1 = 0.013, z2 = 0.008, tau = 0.25;
  const std::size_t n = 2;
  const double t = 4 * n * tau;
  const Superoperator k2 = z1 * (c1 * c1 + c2 * c2) + z2 * (c1 * c2);
  const double trace = expm(-0.5 * t * t * k2).trace().real() / 16;
  EXPECT_NEAR(trace, ts_fidelity(z1, z2, n, tau), 1e-12);
}

TEST(cumulant, fidelity_from_k2_cross_checks) {
  const Superoperator id = Superoperator::identity(4);
  EXPECT_NEAR(fidelity_from_k2(Superoperator::zero(4), 1.0, id), 1.0, 1e-15);
  EXPECT_THROW(fidelity_from_k2(Superoperator::zero(4), 1.0, Superoperator::zero(4)), std::invalid_argument);
  for (std::size_t n : {1, 4}) {
    const double tau = 0.3, tc = 0.4;
    const OuParams p{1.0, tc};
    const auto cp = compile(build_cp(n, tau), kTwoSpin, noise_generator(kTwoSpin), CouplingForm::kWeak);
    const auto rc = numeric_second_cumulant(cp.intervals, p);
    const Superoperator ideal = superpropagator(
        sequence_propagator(build_cp(n, tau), kTwoSpin, internal_hamiltonian(kTwoSpin, CouplingForm::kWeak)));
    EXPECT_NEAR(fidelity_from_k2(rc.k2, rc.duration, ideal), cp_fidelity(cp_zeta(1.0, tc, n, tau), n, tau), 1e-10);
    const auto ts = compile(build_ts(n, tau), kTwoSpin, noise_generator(kTwoSpin), CouplingForm::kWeak);
    const auto rt = numeric_second_cumulant(ts.intervals, p);
    const TsZetas z = ts_zetas(1.0, tc, n, tau);
    EXPECT_NEAR(fidelity_from_k2(rt.k2, rt.duration, id), ts_fidelity(z.zeta1, z.zeta2, n, tau), 1e-10);
  }
}

TEST(cumulant, zero_noise_gives_zero_k2) {
  const auto r = cp_cumulant(2, 0.5, {0.0, 1.0});
  EXPECT_EQ(r.k2.matrix().cwiseAbs().maxCoeff(), 0.0);
  EXPECT_THROW(numeric_second_cumulant({}, OuParams{1.0, 1.0}), std::invalid_argument);
}

TEST(cumulant, k2_is_positive_semidefinite_decay) {
  const auto r = ts_cumulant(3, 0.2, {1.0, 0.5});
  Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (r.k2.matrix() + r.k2.matrix().adjoint()));
  EXPECT_GE(es.eigenvalues().minCoeff(), -1e-12);
}

TEST(cumulant, deterministic_part_matches_magnus_second_term) {
  // Two intervals with non-commuting Hamiltonians, scaled small so the
  // third Magnus term is negligible.
  const double eps = 1e-2;
  const Operator h1 = eps * (0.7 * collective_x(2) + 0.2 * embed(pauli_z(), 0, 2));
  const Operator h2 = eps * (0.4 * collective_y(2) - 0.9 * embed(pauli_z(), 1, 2));
  const double a = 1.3, b = 0.6, t = a + b;
  std::vector<TogglingInterval> ivs{{0.0, a, noise_generator(kTwoSpin), h1}, {a, t, noise_generator(kTwoSpin), h2}};
  const auto r = numeric_second_cumulant(ivs, OuParams{0.0, 1.0});
  // Direct evaluation of the double integral for two pieces.
  const Superoperator l1 = liouvillian(h1), l2 = liouvillian(h2);
  EXPECT_LT(max_abs_diff(r.k2_det, (a * b / (t * t)) * (l2 * l1 - l1 * l2)), 1e-15);
  EXPECT_LT(max_abs_diff(r.k1, (1.0 / t) * (a * l1 + b * l2)), 1e-15);
  // exp(-i t K1 - t^2/2 K2det) reproduces the exact map to third order.
  const Superoperator exact = superpropagator(evolve_unitary(h2, b) * evolve_unitary(h1, a));
  const Superoperator second = expm(Complex(0, -t) * r.k1 - (0.5 * t * t) * r.k2_det);
  const Superoperator first = expm(Complex(0, -t) * r.k1);
  EXPECT_LT(max_abs_diff(exact, second), 10 * eps * eps * eps);
  EXPECT_GT(max_abs_diff(exact, first), 10 * max_abs_diff(exact, second));
}
