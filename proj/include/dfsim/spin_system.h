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

#ifndef DFSIM_SPIN_SYSTEM_H
#define DFSIM_SPIN_SYSTEM_H

#include <array>
#include <cstddef>
#include <utility>
#include <vector>

#include "dfsim/linops.h"

namespace dfsim {

/// Form of the scalar coupling: the full isotropic sigma.sigma term or its
/// secular (weak-coupling) sigma_z sigma_z part.
enum class CouplingForm { kStrong, kWeak };

/// Spin-1/2 register with resonance offsets, scalar couplings and per-spin
/// weights on the collective dephasing generator.
///
/// Offsets are angular frequencies (rad/s). Couplings are kept in Hz and
/// enter the Hamiltonian as (pi/2) J_ij sigma_i.sigma_j.
class SpinSystem {
 public:
  explicit SpinSystem(std::size_t n_spins);
  SpinSystem(std::vector<double> offsets_rad_s, std::vector<std::vector<double>> couplings_hz,
             std::vector<double> noise_weights = {});

  /// Two spins with H = (delta_omega/2)(sz1 - sz2) + (pi/2) J s1.s2.
  static SpinSystem two_spin(double delta_omega_rad_s, double j_hz);

  std::size_t n_spins() const { return offsets_.size(); }
  std::size_t dim() const { return std::size_t{1} << n_spins(); }
  const std::vector<double>& offsets() const { return offsets_; }
  const std::vector<std::vector<double>>& couplings_hz() const { return couplings_; }
  const std::vector<double>& noise_weights() const { return noise_weights_; }

  void set_coupling(std::size_t i, std::size_t j, double j_hz);
  void set_noise_weights(std::vector<double> weights);

 private:
  std::vector<double> offsets_;
  std::vector<std::vector<double>> couplings_;
  std::vector<double> noise_weights_;
};

/// Sum_i (offset_i/2) sz_i + sum_{i<j} (pi/2) J_ij s_i.s_j (or sz_i sz_j when weak).
Operator internal_hamiltonian(const SpinSystem& sys, CouplingForm form = CouplingForm::kStrong);

/// Collective angular momentum (1/2) sum over `targets` of the Pauli on each
/// spin; an empty target list means all spins.
Operator collective_x(std::size_t n_spins, const std::vector<std::size_t>& targets = {});
Operator collective_y(std::size_t n_spins, const std::vector<std::size_t>& targets = {});
Operator collective_z(std::size_t n_spins, const std::vector<std::size_t>& targets = {});

/// Dephasing generator Z = sum_i w_i sz_i / 2.
Operator noise_generator(const SpinSystem& sys);

/// omega_rf exp(-i Z phi) X exp(i Z phi), restricted to `targets` when given.
Operator rf_hamiltonian(const SpinSystem& sys, double amplitude_rad_s, double phase_rad,
                        const std::vector<std::size_t>& targets = {});

/// Logical qubits, each encoded in a pair (i, j) as |0>_L = |0_i 1_j>,
/// |1>_L = |1_i 0_j>.
class DfsEncoding {
 public:
  DfsEncoding(std::size_t n_spins, std::vector<std::pair<std::size_t, std::size_t>> pairs);

  std::size_t n_spins() const { return n_spins_; }
  std::size_t n_qubits() const { return pairs_.size(); }
  const std::vector<std::pair<std::size_t, std::size_t>>& pairs() const { return pairs_; }
  /// Computational basis indices of the logical states, ordered by logical
  /// index with qubit 0 the most significant bit.
  const std::vector<std::size_t>& logical_basis() const { return basis_; }

 private:
  std::size_t n_spins_;
  std::vector<std::pair<std::size_t, std::size_t>> pairs_;
  std::vector<std::size_t> basis_;
};

struct LogicalPaulis {
  Operator identity;
  Operator x;
  Operator y;
  Operator z;
};

/// Logical Pauli set for one encoded qubit, on the full register.
LogicalPaulis logical_paulis(const DfsEncoding& enc, std::size_t qubit);

Operator dfs_projector(const DfsEncoding& enc);

/// Isometry (dim x 2^n_qubits) whose columns are the logical basis kets.
Matrix logical_isometry(const DfsEncoding& enc);

/// Tr[(P rho P)^2] / Tr[rho^2]. Throws std::invalid_argument for rho = 0.
double leakage_fraction(const Operator& rho, const DfsEncoding& enc);

struct LeakageExample {
  Vector state;
  std::size_t basis_index = 0;  // basis state carrying the amplitude
  Complex amplitude;
};

/// exp(-i (pi/4) C_23)|0101> on four spins, where C_23 is s2.s3 (strong) or
/// sz2 sz3 (weak).
LeakageExample interqubit_leakage_example(CouplingForm form = CouplingForm::kStrong);

/// Computational basis index of a bit string given most significant first.
std::size_t basis_index(const std::vector<int>& bits);

}  // namespace dfsim

#endif  // DFSIM_SPIN_SYSTEM_H
