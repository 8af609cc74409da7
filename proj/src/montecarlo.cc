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

#include "dfsim/montecarlo.h"

#include <unsupported/Eigen/KroneckerProduct>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <thread>

namespace dfsim {

namespace {

constexpr std::size_t kBlockSize = 64;

struct Stage {
  bool rotation = false;
  Operator unitary;  // rotations: the rotation; commuting timed events: U_det(duration)
  Operator step_unitary;  // commuting timed events: U_det(h)
  Operator hamiltonian;   // timed events
  bool commutes = false;
  double start = 0.0;
  double duration = 0.0;
  std::size_t n_steps = 0;
  double h = 0.0;
};

struct Plan {
  std::size_t dim = 0;
  Operator z;
  Eigen::VectorXd z_diag;
  std::vector<Stage> stages;
};

Plan make_plan(const SimConfig& cfg) {
  cfg.validate();
  Plan plan;
  const SpinSystem& sys = cfg.system;
  plan.dim = sys.dim();
  plan.z = noise_generator(sys);
  plan.z_diag = plan.z.matrix().diagonal().real();
  const Operator h_int = internal_hamiltonian(sys, cfg.coupling);
  const auto starts = cfg.sequence.event_start_times();
  const double dt = cfg.effective_dt();
  for (std::size_t k = 0; k < cfg.sequence.events.size(); ++k) {
    const PulseEvent& e = cfg.sequence.events[k];
    Stage s;
    s.start = starts[k];
    if (e.kind == EventKind::kIdealRotation) {
      s.rotation = true;
      s.unitary = rotation_unitary(e, sys.n_spins());
      plan.stages.push_back(std::move(s));
      continue;
    }
    s.duration = e.duration;
    s.hamiltonian = e.kind == EventKind::kSegment ? h_int + segment_hamiltonian(e, sys) : h_int;
    if (std::isfinite(dt)) {
      s.n_steps = static_cast<std::size_t>(std::ceil(e.duration / dt * (1.0 - 1e-12)));
    }
    s.n_steps = std::max<std::size_t>(s.n_steps, 1);
    s.h = e.duration / static_cast<double>(s.n_steps);
    const double scale = std::max(1.0, s.hamiltonian.matrix().cwiseAbs().maxCoeff());
    s.commutes = commutator(s.hamiltonian, plan.z).matrix().cwiseAbs().maxCoeff() <= 1e-12 * scale;
    if (s.commutes) {
      s.unitary = evolve_unitary(s.hamiltonian, s.duration);
      s.step_unitary = evolve_unitary(s.hamiltonian, s.h);
    }
    plan.stages.push_back(std::move(s));
  }
  return plan;
}

// Left-multiplies u by diag(exp(-i z phi)).
void apply_phase(Matrix& u, const Eigen::VectorXd& z, double phi) {
  for (Eigen::Index r = 0; r < u.rows(); ++r) u.row(r) *= std::exp(Complex(0.0, -z(r) * phi));
}

// Walks one trajectory. `on_step(u, t)` is called after every step and
// every rotation when `record` is set; otherwise commuting events are
// collapsed into one exact propagator.
template <typename OnStep>
Matrix propagate(const Plan& plan, const OuParams& noise, RandomStream stream, bool record, OnStep&& on_step) {
  Matrix u = Matrix::Identity(static_cast<Eigen::Index>(plan.dim), static_cast<Eigen::Index>(plan.dim));
  const bool noisy = noise.strength > 0.0;
  OuSampler sampler(noise, std::move(stream));
  bool started = false;
  double last_mid = 0.0;
  auto sample = [&](double t_mid) {
    if (!noisy) return 0.0;
    const double w = started ? sampler.advance(t_mid - last_mid) : sampler.first();
    started = true;
    last_mid = t_mid;
    return w;
  };
  for (const Stage& s : plan.stages) {
    if (s.rotation) {
      u = s.unitary.matrix() * u;
      if (record) on_step(u, s.start);
      continue;
    }
    double phi = 0.0;
    for (std::size_t k = 0; k < s.n_steps; ++k) {
      const double t_mid = s.start + (static_cast<double>(k) + 0.5) * s.h;
      const double w = sample(t_mid);
      if (s.commutes) {
        if (record) {
          u = s.step_unitary.matrix() * u;
          apply_phase(u, plan.z_diag, w * s.h);
        } else {
          phi += w * s.h;
        }
      } else {
        u = evolve_unitary(s.hamiltonian + w * plan.z, s.h).matrix() * u;
      }
      if (record) on_step(u, s.start + static_cast<double>(k + 1) * s.h);
    }
    if (s.commutes && !record) {
      u = s.unitary.matrix() * u;
      apply_phase(u, plan.z_diag, phi);
    }
  }
  return u;
}

std::size_t resolve_threads(std::size_t requested) {
  if (requested != 0) return requested;
  return std::max<std::size_t>(1, std::thread::hardware_concurrency());
}

// Runs fn(block) for every block in [0, n_blocks) on a pool of workers;
// results land at their block index, so scheduling does not matter.
template <typename T, typename Fn>
std::vector<T> run_blocks(std::size_t n_blocks, std::size_t threads, Fn&& fn) {
  std::vector<T> out(n_blocks);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t b = next++; b < n_blocks; b = next++) out[b] = fn(b);
  };
  const std::size_t n_workers = std::min(resolve_threads(threads), n_blocks);
  if (n_workers <= 1) {
    worker();
    return out;
  }
  std::vector<std::thread> pool;
  pool.reserve(n_workers);
  for (std::size_t i = 0; i < n_workers; ++i) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  return out;
}

// Pairwise reduction in index order.
template <typename T, typename Merge>
T reduce_pairwise(std::vector<T> items, Merge&& merge) {
  while (items.size() > 1) {
    std::vector<T> next;
    next.reserve((items.size() + 1) / 2);
    for (std::size_t i = 0; i + 1 < items.size(); i += 2) next.push_back(merge(items[i], items[i + 1]));
    if (items.size() % 2 == 1) next.push_back(std::move(items.back()));
    items = std::move(next);
  }
  return std::move(items.front());
}

struct EnsembleBlock {
  Matrix s_sum;
  double count = 0.0;
  double mean = 0.0;
  double m2 = 0.0;
};

double gate_overlap(const Matrix& u_ideal_adj, const Matrix& u) {
  const double d = static_cast<double>(u.rows());
  return std::norm((u_ideal_adj * u).trace()) / (d * d);
}

}  // namespace

void SimConfig::validate() const {
  noise.validate();
  if (n_traj < 1) throw std::invalid_argument("n_traj must be at least 1");
  if (dt < 0.0 || !std::isfinite(dt)) throw std::invalid_argument("dt must be finite and non-negative");
  for (const auto& e : sequence.events) e.validate();
}

double SimConfig::effective_dt() const {
  if (dt > 0.0) return dt;
  double bound = std::numeric_limits<double>::infinity();
  if (sequence.tau > 0.0) bound = std::min(bound, sequence.tau / 50.0);
  if (std::isfinite(noise.tau_c)) bound = std::min(bound, noise.tau_c / 20.0);
  return bound;
}

bool SimConfig::dt_exceeds_default() const {
  if (dt <= 0.0) return false;
  SimConfig d = *this;
  d.dt = 0.0;
  return dt > d.effective_dt() * (1.0 + 1e-12);
}

Operator run_trajectory(const SimConfig& cfg, std::uint64_t stream_index) {
  const Plan plan = make_plan(cfg);
  return Operator(propagate(plan, cfg.noise, cfg.rng.stream(stream_index), false, [](const Matrix&, double) {}));
}

Operator noiseless_propagator(const SimConfig& cfg) {
  SimConfig quiet = cfg;
  quiet.noise.strength = 0.0;
  return run_trajectory(quiet, 0);
}

EnsembleResult average_superpropagator(const SimConfig& cfg, const std::optional<Operator>& ideal) {
  const Plan plan = make_plan(cfg);
  const Matrix ideal_adj = (ideal ? *ideal : noiseless_propagator(cfg)).matrix().adjoint();
  if (static_cast<std::size_t>(ideal_adj.rows()) != plan.dim) {
    throw std::invalid_argument("average_superpropagator: ideal dimension mismatch");
  }
  const auto d2 = static_cast<Eigen::Index>(plan.dim * plan.dim);
  const std::size_t n_blocks = (cfg.n_traj + kBlockSize - 1) / kBlockSize;

  auto blocks = run_blocks<EnsembleBlock>(n_blocks, cfg.threads, [&](std::size_t b) {
    EnsembleBlock blk;
    blk.s_sum = Matrix::Zero(d2, d2);
    const std::size_t end = std::min(cfg.n_traj, (b + 1) * kBlockSize);
    for (std::size_t i = b * kBlockSize; i < end; ++i) {
      const Matrix u = propagate(plan, cfg.noise, cfg.rng.stream(i), false, [](const Matrix&, double) {});
      blk.s_sum += Eigen::kroneckerProduct(u.conjugate(), u).eval();
      const double f = gate_overlap(ideal_adj, u);
      blk.count += 1.0;
      const double delta = f - blk.mean;
      blk.mean += delta / blk.count;
      blk.m2 += delta * (f - blk.mean);
    }
    return blk;
  });

  EnsembleBlock total = reduce_pairwise(std::move(blocks), [](const EnsembleBlock& a, const EnsembleBlock& b) {
    EnsembleBlock m;
    m.s_sum = a.s_sum + b.s_sum;
    m.count = a.count + b.count;
    const double delta = b.mean - a.mean;
    m.mean = a.mean + delta * b.count / m.count;
    m.m2 = a.m2 + b.m2 + delta * delta * a.count * b.count / m.count;
    return m;
  });

  EnsembleResult out;
  out.n_traj = cfg.n_traj;
  out.s_avg = Superoperator(total.s_sum / total.count);
  out.fidelity = total.mean;
  out.fidelity_stderr = total.count > 1.0 ? std::sqrt(total.m2 / (total.count - 1.0) / total.count) : 0.0;
  return out;
}

double entanglement_fidelity(const Superoperator& s, const Operator& u_ideal) {
  const Superoperator ideal = superpropagator(u_ideal);
  if (ideal.dim() != s.dim()) throw std::invalid_argument("entanglement_fidelity: dimension mismatch");
  const double d2 = static_cast<double>(s.dim());
  return (ideal.matrix().adjoint() * s.matrix()).trace().real() / d2;
}

ObservableSeries observable_series(const SimConfig& cfg, const Operator& rho0, const std::optional<Operator>& rho_want,
                                   const std::optional<DfsEncoding>& encoding) {
  if (!rho0.is_hermitian(1e-10)) throw std::invalid_argument("observable_series: rho0 must be Hermitian");
  const Plan plan = make_plan(cfg);
  if (rho0.dim() != plan.dim) throw std::invalid_argument("observable_series: rho0 dimension mismatch");
  Operator want;
  if (rho_want) {
    want = *rho_want;
  } else {
    const Operator u = noiseless_propagator(cfg);
    want = u * rho0 * u.adjoint();
  }

  std::vector<double> times{0.0};
  const Matrix& r0 = rho0.matrix();
  const bool noisy = cfg.noise.strength > 0.0;
  const std::size_t n_traj = noisy ? cfg.n_traj : 1;
  const std::size_t n_blocks = (n_traj + kBlockSize - 1) / kBlockSize;

  // Times are identical for every trajectory; collect them once.
  propagate(plan, OuParams{0.0, cfg.noise.tau_c}, cfg.rng.stream(0), true,
            [&](const Matrix&, double t) { times.push_back(t); });

  auto sums = run_blocks<std::vector<Matrix>>(n_blocks, cfg.threads, [&](std::size_t b) {
    std::vector<Matrix> acc(times.size(), Matrix::Zero(r0.rows(), r0.cols()));
    const std::size_t end = std::min(n_traj, (b + 1) * kBlockSize);
    for (std::size_t i = b * kBlockSize; i < end; ++i) {
      acc[0] += r0;
      std::size_t k = 1;
      propagate(plan, cfg.noise, cfg.rng.stream(i), true,
                [&](const Matrix& u, double) { acc[k++] += u * r0 * u.adjoint(); });
    }
    return acc;
  });
  std::vector<Matrix> mean = reduce_pairwise(std::move(sums), [](const std::vector<Matrix>& a, const std::vector<Matrix>& b) {
    std::vector<Matrix> m(a.size());
    for (std::size_t k = 0; k < a.size(); ++k) m[k] = a[k] + b[k];
    return m;
  });

  ObservableSeries out;
  out.times = times;
  for (auto& m : mean) {
    const Operator rho(m / static_cast<double>(n_traj));
    out.purity.push_back((rho * rho).trace().real());
    out.correlation.push_back((want * rho).trace().real());
    if (encoding) out.leakage.push_back(leakage_fraction(rho, *encoding));
  }
  return out;
}

PurityCorrelation lindblad_pi_pulse(double t2, double omega_rf, const Operator& rho0) {
  if (!(t2 > 0.0)) throw std::invalid_argument("lindblad_pi_pulse: T2 must be positive");
  if (!(omega_rf > 0.0)) throw std::invalid_argument("lindblad_pi_pulse: omega_rf must be positive");
  if (rho0.dim() != 4) throw std::invalid_argument("lindblad_pi_pulse: rho0 must be a two-spin operator");
  const Operator x = collective_x(2);
  const Superoperator cz = commutator_superoperator(collective_z(2));
  const Superoperator gen = Complex(0.0, -omega_rf) * liouvillian(x) - (1.0 / t2) * (cz * cz);
  const double t_p = kPi / omega_rf;
  const Operator rho = expm(t_p * gen).apply(rho0);
  const Operator u = evolve_unitary(omega_rf * x, t_p);
  const Operator want = u * rho0 * u.adjoint();
  const double norm = (rho0 * rho0).trace().real();
  if (!(norm > 0.0)) throw std::invalid_argument("lindblad_pi_pulse: rho0 must be nonzero");
  PurityCorrelation out;
  out.purity = (rho * rho).trace().real() / norm;
  out.correlation = (want * rho).trace().real() / norm;
  return out;
}

}  // namespace dfsim
