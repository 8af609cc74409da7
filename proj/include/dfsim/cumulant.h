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

#ifndef DFSIM_CUMULANT_H
#define DFSIM_CUMULANT_H

#include <Eigen/Dense>

#include <cstddef>
#include <vector>

#include "dfsim/linops.h"
#include "dfsim/noise.h"
#include "dfsim/sequences.h"

namespace dfsim {

/// Closed-form CP attenuation coefficient zeta, with K2 = zeta * Z_x^2.
double cp_zeta(double strength, double tau_c, std::size_t n, double tau);

/// (3 + 4 exp(-2 zeta n^2 tau^2) + exp(-8 zeta n^2 tau^2)) / 8.
double cp_fidelity(double zeta, std::size_t n, double tau);

struct TsZetas {
  double zeta1 = 0.0;  // coefficient of Z_1^2 + Z_2^2
  double zeta2 = 0.0;  // coefficient of Z_1 Z_2
};

/// TS attenuation coefficients from the per-cycle triangle / cross-cycle
/// square decomposition, summed in closed form. Z_1 and Z_2 are the
/// toggling-frame generators of the first and second delay of a cycle.
TsZetas ts_zetas(double strength, double tau_c, std::size_t n, double tau);

/// The published TS closed forms evaluated verbatim (overflow-safe
/// rearrangement). They agree with ts_zetas only up to a factor 2 at n = 1
/// and drift further for n >= 3; kept for comparison.
TsZetas ts_zetas_printed(double strength, double tau_c, std::size_t n, double tau);

/// 0.5 exp(-a) (cosh(a) + cosh(b)) with a = zeta1 (4 n tau)^2, b = zeta2 (4 n tau)^2 / 2.
double ts_fidelity(double zeta1, double zeta2, std::size_t n, double tau);

/// Second-order cumulant of a piecewise-constant toggling-frame description.
///
/// k2 is the stochastic part (2/t^2) iint_{t2<t1} G(t1-t2) Z(t1) Z(t2), built
/// from `generators` as sum_ab coefficients(a, b) Z_a Z_b where a labels the
/// later time. k2_det is the commutator part (1/t^2) iint [L(t1), L(t2)] of
/// the deterministic Hamiltonian and k1 its time average.
struct CumulantResult {
  Superoperator k1;
  Superoperator k2;
  Superoperator k2_det;
  double duration = 0.0;
  std::vector<Operator> generators;  // distinct noise generators, up to sign
  Eigen::MatrixXd coefficients;

  /// Coefficient of Z_a^2 (a == b) or of the symmetric pair Z_a Z_b + Z_b Z_a.
  double pair_coefficient(std::size_t a, std::size_t b) const;
};

CumulantResult numeric_second_cumulant(const std::vector<TogglingInterval>& intervals, const OuParams& noise);

/// iint_{0<t2<t1<L} G(t1 - t2) for the exponential kernel.
double ou_triangle_integral(const OuParams& noise, double length);

/// int_{I1} int_{I2} G(t1 - t2) for disjoint intervals separated by `gap`
/// (start of the later minus end of the earlier).
double ou_rectangle_integral(const OuParams& noise, double length_late, double length_early, double gap);

/// Tr[ideal^-1 (ideal exp(-k2 t^2 / 2))] / d^2: entanglement fidelity of the
/// ideal map followed by toggling-frame Gaussian attenuation.
/// Throws std::invalid_argument if `ideal` is not invertible.
double fidelity_from_k2(const Superoperator& k2, double duration, const Superoperator& ideal);

}  // namespace dfsim

#endif  // DFSIM_CUMULANT_H
