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

#include "dfsim/spin_system.h"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace dfsim {

namespace {

std::vector<std::size_t> resolve_targets(std::size_t n_spins, const std::vector<std::size_t>& targets) {
  if (targets.empty()) {
    std::vector<std::size_t> all(n_spins);
    for (std::size_t i = 0; i < n_spins; ++i) all[i] = i;
    return all;
  }
  for (auto t : targets) {
    if (t >= n_spins) throw std::out_of_range("target spin " + std::to_string(t) + " out of range");
  }
  return targets;
}

Operator collective(std::size_t n_spins, const std::vector<std::size_t>& targets, const Operator& pauli) {
  Operator out = Operator::zero(std::size_t{1} << n_spins);
  for (auto t : resolve_targets(n_spins, targets)) out += 0.5 * embed(pauli, t, n_spins);
  return out;
}

Operator pair_product(const Operator& a, std::size_t i, const Operator& b, std::size_t j, std::size_t n) {
  return embed(a, i, n) * embed(b, j, n);
}

}  // namespace

SpinSystem::SpinSystem(std::size_t n_spins)
    : offsets_(n_spins, 0.0),
      couplings_(n_spins, std::vector<double>(n_spins, 0.0)),
      noise_weights_(n_spins, 1.0) {
  if (n_spins == 0) throw std::invalid_argument("SpinSystem needs at least one spin");
  if (n_spins > 8) throw std::invalid_argument("SpinSystem supports at most 8 spins");
}

SpinSystem::SpinSystem(std::vector<double> offsets_rad_s, std::vector<std::vector<double>> couplings_hz,
                       std::vector<double> noise_weights)
    : SpinSystem(offsets_rad_s.size()) {
  offsets_ = std::move(offsets_rad_s);
  const std::size_t n = offsets_.size();
  if (!couplings_hz.empty()) {
    if (couplings_hz.size() != n) throw std::invalid_argument("coupling matrix must be n_spins x n_spins");
    for (std::size_t i = 0; i < n; ++i) {
      if (couplings_hz[i].size() != n) {
        throw std::invalid_argument("coupling matrix must be n_spins x n_spins");
      }
      if (couplings_hz[i][i] != 0.0) throw std::invalid_argument("coupling matrix diagonal must be zero");
      for (std::size_t j = 0; j < i; ++j) {
        if (couplings_hz[i][j] != couplings_hz[j][i]) {
          throw std::invalid_argument("coupling matrix must be symmetric");
        }
      }
    }
    couplings_ = std::move(couplings_hz);
  }
  if (!noise_weights.empty()) set_noise_weights(std::move(noise_weights));
}

SpinSystem SpinSystem::two_spin(double delta_omega_rad_s, double j_hz) {
  SpinSystem sys({delta_omega_rad_s, -delta_omega_rad_s}, {});
  sys.set_coupling(0, 1, j_hz);
  return sys;
}

void SpinSystem::set_coupling(std::size_t i, std::size_t j, double j_hz) {
  if (i >= n_spins() || j >= n_spins()) throw std::out_of_range("coupling index out of range");
  if (i == j) throw std::invalid_argument("a spin cannot couple to itself");
  couplings_[i][j] = j_hz;
  couplings_[j][i] = j_hz;
}

void SpinSystem::set_noise_weights(std::vector<double> weights) {
  if (weights.size() != n_spins()) throw std::invalid_argument("noise_weights length must equal n_spins");
  noise_weights_ = std::move(weights);
}

Operator internal_hamiltonian(const SpinSystem& sys, CouplingForm form) {
  const std::size_t n = sys.n_spins();
  Operator h = Operator::zero(sys.dim());
  for (std::size_t i = 0; i < n; ++i) h += (sys.offsets()[i] / 2.0) * embed(pauli_z(), i, n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double jij = sys.couplings_hz()[i][j];
      if (jij == 0.0) continue;
      Operator term = pair_product(pauli_z(), i, pauli_z(), j, n);
      if (form == CouplingForm::kStrong) {
        term += pair_product(pauli_x(), i, pauli_x(), j, n);
        term += pair_product(pauli_y(), i, pauli_y(), j, n);
      }
      h += (kPi / 2.0 * jij) * term;
    }
  }
  return h;
}

Operator collective_x(std::size_t n_spins, const std::vector<std::size_t>& targets) {
  return collective(n_spins, targets, pauli_x());
}

Operator collective_y(std::size_t n_spins, const std::vector<std::size_t>& targets) {
  return collective(n_spins, targets, pauli_y());
}

Operator collective_z(std::size_t n_spins, const std::vector<std::size_t>& targets) {
  return collective(n_spins, targets, pauli_z());
}

Operator noise_generator(const SpinSystem& sys) {
  const std::size_t n = sys.n_spins();
  Operator z = Operator::zero(sys.dim());
  for (std::size_t i = 0; i < n; ++i) z += (sys.noise_weights()[i] / 2.0) * embed(pauli_z(), i, n);
  return z;
}

Operator rf_hamiltonian(const SpinSystem& sys, double amplitude_rad_s, double phase_rad,
                        const std::vector<std::size_t>& targets) {
  if (amplitude_rad_s < 0.0) throw std::invalid_argument("rf amplitude must be non-negative");
  const std::size_t n = sys.n_spins();
  const Operator frame = evolve_unitary(collective_z(n, targets), phase_rad);
  return amplitude_rad_s * (frame * collective_x(n, targets) * frame.adjoint());
}

DfsEncoding::DfsEncoding(std::size_t n_spins, std::vector<std::pair<std::size_t, std::size_t>> pairs)
    : n_spins_(n_spins), pairs_(std::move(pairs)) {
  if (pairs_.empty()) throw std::invalid_argument("DfsEncoding needs at least one pair");
  std::vector<bool> used(n_spins, false);
  for (const auto& [a, b] : pairs_) {
    if (a >= n_spins || b >= n_spins || a == b) throw std::invalid_argument("invalid DFS pair");
    if (used[a] || used[b]) throw std::invalid_argument("DFS pairs must be disjoint");
    used[a] = used[b] = true;
  }
  if (std::find(used.begin(), used.end(), false) != used.end()) {
    throw std::invalid_argument("DFS pairs must cover every spin");
  }
  const std::size_t nq = pairs_.size();
  for (std::size_t logical = 0; logical < (std::size_t{1} << nq); ++logical) {
    std::vector<int> bits(n_spins, 0);
    for (std::size_t q = 0; q < nq; ++q) {
      const int bit = static_cast<int>((logical >> (nq - 1 - q)) & 1U);
      bits[pairs_[q].first] = bit;
      bits[pairs_[q].second] = 1 - bit;
    }
    basis_.push_back(basis_index(bits));
  }
}

LogicalPaulis logical_paulis(const DfsEncoding& enc, std::size_t qubit) {
  if (qubit >= enc.n_qubits()) throw std::out_of_range("logical qubit index out of range");
  const auto [i, j] = enc.pairs()[qubit];
  const std::size_t n = enc.n_spins();
  const Operator id = Operator::identity(std::size_t{1} << n);
  // sigma_y^L is oriented so that [x, y] = 2i z on the code space.
  return LogicalPaulis{
      0.5 * (id - pair_product(pauli_z(), i, pauli_z(), j, n)),
      0.5 * (pair_product(pauli_x(), i, pauli_x(), j, n) + pair_product(pauli_y(), i, pauli_y(), j, n)),
      0.5 * (pair_product(pauli_y(), i, pauli_x(), j, n) - pair_product(pauli_x(), i, pauli_y(), j, n)),
      0.5 * (embed(pauli_z(), i, n) - embed(pauli_z(), j, n)),
  };
}

Operator dfs_projector(const DfsEncoding& enc) {
  Operator p = Operator::zero(std::size_t{1} << enc.n_spins());
  Matrix m = p.matrix();
  for (auto b : enc.logical_basis()) m(static_cast<Eigen::Index>(b), static_cast<Eigen::Index>(b)) = 1.0;
  return Operator(std::move(m));
}

Matrix logical_isometry(const DfsEncoding& enc) {
  const auto dim = static_cast<Eigen::Index>(std::size_t{1} << enc.n_spins());
  const auto& basis = enc.logical_basis();
  Matrix v = Matrix::Zero(dim, static_cast<Eigen::Index>(basis.size()));
  for (std::size_t k = 0; k < basis.size(); ++k) {
    v(static_cast<Eigen::Index>(basis[k]), static_cast<Eigen::Index>(k)) = 1.0;
  }
  return v;
}

double leakage_fraction(const Operator& rho, const DfsEncoding& enc) {
  const double total = (rho.matrix() * rho.matrix()).trace().real();
  if (!(total > 0.0)) throw std::invalid_argument("leakage_fraction: Tr[rho^2] must be positive");
  const Operator p = dfs_projector(enc);
  const Matrix inside = p.matrix() * rho.matrix() * p.matrix();
  return (inside * inside).trace().real() / total;
}

LeakageExample interqubit_leakage_example(CouplingForm form) {
  SpinSystem sys(4);
  sys.set_coupling(1, 2, 1.0);
  // internal_hamiltonian gives (pi/2) J C_23; rescale to C_23 itself.
  const Operator c23 = (2.0 / kPi) * internal_hamiltonian(sys, form);
  const Operator u = evolve_unitary(c23, kPi / 4.0);
  Vector psi = Vector::Zero(16);
  psi(static_cast<Eigen::Index>(basis_index({0, 1, 0, 1}))) = 1.0;
  LeakageExample out;
  out.state = u.matrix() * psi;
  Eigen::Index best = 0;
  out.state.cwiseAbs().maxCoeff(&best);
  out.basis_index = static_cast<std::size_t>(best);
  out.amplitude = out.state(best);
  return out;
}

std::size_t basis_index(const std::vector<int>& bits) {
  std::size_t idx = 0;
  for (int b : bits) {
    if (b != 0 && b != 1) throw std::invalid_argument("basis bits must be 0 or 1");
    idx = (idx << 1) | static_cast<std::size_t>(b);
  }
  return idx;
}

}  // namespace dfsim
