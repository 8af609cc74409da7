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

#ifndef DFSIM_MONTECARLO_H
#define DFSIM_MONTECARLO_H

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "dfsim/linops.h"
#include "dfsim/noise.h"
#include "dfsim/sequences.h"
#include "dfsim/spin_system.h"

namespace dfsim {

struct SimConfig {
  SpinSystem system{2};
  CouplingForm coupling = CouplingForm::kStrong;
  PulseSequence sequence;
  OuParams noise;
  /// Maximum step length. Zero selects min(tau/50, tau_c/20), dropping terms
  /// that do not apply (no spacing, infinite tau_c); if neither applies every
  /// timed event is one step.
  double dt = 0.0;
  std::size_t n_traj = 1;
  RngPolicy rng;
  /// Worker threads; zero means std::thread::hardware_concurrency().
  std::size_t threads = 1;

  /// Throws std::invalid_argument on a malformed configuration.
  void validate() const;
  /// The step bound actually used.
  double effective_dt() const;
  /// True when `dt` exceeds the default bound (allowed, but worth a warning).
  bool dt_exceeds_default() const;
};

struct EnsembleResult {
  Superoperator s_avg;
  double fidelity = 0.0;
  double fidelity_stderr = 0.0;
  std::size_t n_traj = 0;
};

/// One noisy trajectory: ordered product of per-step propagators
/// exp(-i (H_int + H_rf + omega_k Z) h). Noise is an OU path sampled at step
/// midpoints and held over the step; ideal rotations act instantaneously.
Operator run_trajectory(const SimConfig& cfg, std::uint64_t stream_index);

/// Propagator of the sequence with the noise switched off.
Operator noiseless_propagator(const SimConfig& cfg);

/// Mean of conj(U_i) (x) U_i over cfg.n_traj trajectories. Fidelity is the
/// mean of |Tr(U_ideal^dag U_i)|^2 / d^2 with U_ideal the noiseless
/// propagator (or `ideal` if given); stderr is the standard error of those
/// per-trajectory values. Block sums are reduced in a fixed order, so the
/// result does not depend on the thread count.
EnsembleResult average_superpropagator(const SimConfig& cfg, const std::optional<Operator>& ideal = std::nullopt);

/// Tr(superpropagator(U_ideal)^dag S) / d^2.
double entanglement_fidelity(const Superoperator& s, const Operator& u_ideal);

struct ObservableSeries {
  std::vector<double> times;
  std::vector<double> purity;       // Tr rho^2
  std::vector<double> correlation;  // Tr rho_want rho
  std::vector<double> leakage;      // Tr[(P rho P)^2] / Tr rho^2; empty without an encoding
};

/// Ensemble-averaged state at every step boundary (including t = 0) for the
/// initial state rho0. `rho_want` defaults to the noiselessly evolved final state.
ObservableSeries observable_series(const SimConfig& cfg, const Operator& rho0,
                                   const std::optional<Operator>& rho_want = std::nullopt,
                                   const std::optional<DfsEncoding>& encoding = std::nullopt);

struct PurityCorrelation {
  double purity = 0.0;
  double correlation = 0.0;
};

/// Two-spin pi pulse about collective x under correlated dephasing,
///   d rho/dt = -i [omega_rf X, rho] - (1/T2) [Z, [Z, rho]],
/// integrated over t_p = pi / omega_rf. Z and X are collective (half-Pauli
/// sums), so a single-spin coherence decays as exp(-t/T2). Both outputs are
/// divided by Tr rho0^2; rho_want is the ideal pi-rotated rho0.
PurityCorrelation lindblad_pi_pulse(double t2, double omega_rf, const Operator& rho0);

}  // namespace dfsim

#endif  // DFSIM_MONTECARLO_H
