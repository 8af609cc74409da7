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

#include "dfsim/smp.h"

#include <gsl/gsl_errno.h>
#include <gsl/gsl_multimin.h>
#include <gsl/gsl_vector.h>

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <istream>
#include <limits>
#include <memory>
#include <ostream>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>

#include "dfsim/noise.h"

namespace dfsim {

namespace {

constexpr double kTwoPi = 2.0 * kPi;

struct Codec {
  const SmpProblem& p;

  std::vector<SmpSegment> decode(const gsl_vector* x) const {
    std::vector<SmpSegment> segs(p.n_segments);
    for (std::size_t k = 0; k < p.n_segments; ++k) {
      const double v = gsl_vector_get(x, 4 * k);
      const double u = gsl_vector_get(x, 4 * k + 1);
      const double s = std::sin(u);
      segs[k].duration = p.duration_scale * std::exp(std::clamp(v, -30.0, 30.0));
      segs[k].amplitude = p.max_amplitude * s * s;
      segs[k].phase = gsl_vector_get(x, 4 * k + 2);
      segs[k].offset = p.offset_scale * gsl_vector_get(x, 4 * k + 3);
    }
    return segs;
  }

  void encode(const std::vector<SmpSegment>& segs, gsl_vector* x) const {
    for (std::size_t k = 0; k < p.n_segments; ++k) {
      const SmpSegment& s = segs[k];
      gsl_vector_set(x, 4 * k, std::log(s.duration / p.duration_scale));
      gsl_vector_set(x, 4 * k + 1, std::asin(std::sqrt(std::clamp(s.amplitude / p.max_amplitude, 0.0, 1.0))));
      gsl_vector_set(x, 4 * k + 2, s.phase);
      gsl_vector_set(x, 4 * k + 3, s.offset / p.offset_scale);
    }
  }
};

struct ObjectiveState {
  const SmpProblem* problem;
  const Codec* codec;
  std::size_t evaluations = 0;
  double best = -1.0;
  std::vector<SmpSegment> best_segments;
};

double objective(const gsl_vector* x, void* params) {
  auto* st = static_cast<ObjectiveState*>(params);
  ++st->evaluations;
  const auto segs = st->codec->decode(x);
  const double f = st->problem->fidelity(segs);
  if (!std::isfinite(f)) return 1.0;
  if (f > st->best) {
    st->best = f;
    st->best_segments = segs;
  }
  return 1.0 - f;
}

std::vector<SmpSegment> random_start(const SmpProblem& p, RandomStream& rng) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<SmpSegment> segs(p.n_segments);
  for (auto& s : segs) {
    s.duration = p.duration_scale * std::exp(0.5 * normal(rng));
    s.amplitude = p.max_amplitude * unit(rng);
    s.phase = kTwoPi * unit(rng);
    s.offset = p.offset_scale * normal(rng);
  }
  return segs;
}

struct GslVectorDeleter {
  void operator()(gsl_vector* v) const { gsl_vector_free(v); }
};
struct GslMinimizerDeleter {
  void operator()(gsl_multimin_fminimizer* m) const { gsl_multimin_fminimizer_free(m); }
};

}  // namespace

void SmpSegment::validate() const {
  if (!(duration > 0.0) || !std::isfinite(duration)) throw std::invalid_argument("SMP segment duration must be positive");
  if (!(amplitude >= 0.0) || !std::isfinite(amplitude)) {
    throw std::invalid_argument("SMP segment amplitude must be non-negative");
  }
  if (!std::isfinite(phase) || !std::isfinite(offset)) throw std::invalid_argument("SMP segment phase/offset not finite");
}

PulseEvent SmpSegment::to_event() const { return PulseEvent::segment(duration, amplitude, phase, offset); }

Operator smp_propagator(const std::vector<SmpSegment>& segments, const SpinSystem& sys, CouplingForm form) {
  const Operator h_int = internal_hamiltonian(sys, form);
  Operator u = Operator::identity(sys.dim());
  for (const auto& s : segments) {
    s.validate();
    u = evolve_unitary(h_int + segment_hamiltonian(s.to_event(), sys), s.duration) * u;
  }
  return u;
}

double gate_fidelity(const Operator& u, const Operator& target) {
  if (u.dim() != target.dim()) throw std::invalid_argument("gate_fidelity: dimension mismatch");
  const double d = static_cast<double>(u.dim());
  return std::min(1.0, std::norm(hs_inner(target, u)) / (d * d));
}

double logical_gate_fidelity(const Operator& u, const Operator& logical_target, const DfsEncoding& enc) {
  const Matrix v = logical_isometry(enc);
  if (static_cast<std::size_t>(v.cols()) != logical_target.dim() || static_cast<std::size_t>(v.rows()) != u.dim()) {
    throw std::invalid_argument("logical_gate_fidelity: dimension mismatch");
  }
  const Matrix reduced = v.adjoint() * u.matrix() * v;
  const double d = static_cast<double>(logical_target.dim());
  return std::min(1.0, std::norm((logical_target.matrix().adjoint() * reduced).trace()) / (d * d));
}

void SmpProblem::validate() const {
  if (n_segments < 1) throw std::invalid_argument("SmpProblem: n_segments must be at least 1");
  if (!target.is_unitary(1e-9)) throw std::invalid_argument("SmpProblem: target must be unitary");
  const std::size_t expected = encoding ? (std::size_t{1} << encoding->n_qubits()) : system.dim();
  if (target.dim() != expected) throw std::invalid_argument("SmpProblem: target dimension mismatch");
  if (encoding && encoding->n_spins() != system.n_spins()) {
    throw std::invalid_argument("SmpProblem: encoding does not match the spin system");
  }
  if (!(max_amplitude > 0.0) || !(duration_scale > 0.0) || !(offset_scale > 0.0)) {
    throw std::invalid_argument("SmpProblem: scales must be positive");
  }
  if (max_evaluations == 0) throw std::invalid_argument("SmpProblem: evaluation budget must be positive");
  if (!initial_guess.empty()) {
    if (initial_guess.size() != n_segments) throw std::invalid_argument("SmpProblem: initial guess has wrong length");
    for (const auto& s : initial_guess) {
      s.validate();
      if (s.amplitude > max_amplitude) throw std::invalid_argument("SmpProblem: initial amplitude above the bound");
    }
  }
}

double SmpProblem::fidelity(const std::vector<SmpSegment>& segments) const {
  const Operator u = smp_propagator(segments, system, coupling);
  return encoding ? logical_gate_fidelity(u, target, *encoding) : gate_fidelity(u, target);
}

SmpResult smp_search(const SmpProblem& problem) {
  problem.validate();
  const Codec codec{problem};
  const std::size_t dim = 4 * problem.n_segments;
  ObjectiveState state{&problem, &codec, 0, -1.0, {}};

  gsl_multimin_function fn;
  fn.n = dim;
  fn.f = &objective;
  fn.params = &state;

  std::unique_ptr<gsl_vector, GslVectorDeleter> x(gsl_vector_alloc(dim));
  std::unique_ptr<gsl_vector, GslVectorDeleter> step(gsl_vector_alloc(dim));
  for (std::size_t k = 0; k < problem.n_segments; ++k) {
    gsl_vector_set(step.get(), 4 * k, 0.3);
    gsl_vector_set(step.get(), 4 * k + 1, 0.2);
    gsl_vector_set(step.get(), 4 * k + 2, 0.5);
    gsl_vector_set(step.get(), 4 * k + 3, 0.5);
  }
  std::unique_ptr<gsl_multimin_fminimizer, GslMinimizerDeleter> mini(
      gsl_multimin_fminimizer_alloc(gsl_multimin_fminimizer_nmsimplex2, dim));

  SmpResult result;
  const RngPolicy rng_policy(problem.seed);
  const std::size_t n_starts = std::max<std::size_t>(1, problem.restarts);
  const std::size_t per_start = std::max<std::size_t>(1, problem.max_evaluations / n_starts);

  for (std::size_t r = 0; r < n_starts && state.evaluations < problem.max_evaluations; ++r) {
    std::vector<SmpSegment> start;
    if (r == 0 && !problem.initial_guess.empty()) {
      start = problem.initial_guess;
    } else {
      RandomStream rng = rng_policy.stream(r);
      start = random_start(problem, rng);
    }
    codec.encode(start, x.get());
    if (r == 0) {
      result.initial_fidelity = problem.fidelity(codec.decode(x.get()));
      state.best = std::max(state.best, result.initial_fidelity);
      if (state.best_segments.empty()) state.best_segments = codec.decode(x.get());
      result.trace.push_back(state.best);
    }
    gsl_multimin_fminimizer_set(mini.get(), &fn, x.get(), step.get());
    const std::size_t stop_at = std::min(problem.max_evaluations, state.evaluations + per_start);
    while (state.evaluations < stop_at) {
      if (gsl_multimin_fminimizer_iterate(mini.get()) != GSL_SUCCESS) break;
      result.trace.push_back(state.best);
      if (gsl_multimin_fminimizer_size(mini.get()) < problem.tolerance) break;
      if (1.0 - state.best < 1e-14) break;
    }
  }

  result.segments = state.best_segments;
  result.fidelity = state.best;
  result.evaluations = state.evaluations;
  result.budget_exhausted = state.evaluations >= problem.max_evaluations;
  return result;
}

void write_smp_table(std::ostream& os, const std::vector<SmpSegment>& segments) {
  const auto old_precision = os.precision(17);
  os << "# duration_s amplitude_hz phase_rad offset_hz\n";
  for (const auto& s : segments) {
    os << s.duration << ' ' << s.amplitude / kTwoPi << ' ' << s.phase << ' ' << s.offset / kTwoPi << '\n';
  }
  os.precision(old_precision);
}

std::vector<SmpSegment> read_smp_table(std::istream& is) {
  std::vector<SmpSegment> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream row(line);
    double values[4];
    std::size_t count = 0;
    for (double v; count < 4 && row >> v;) values[count++] = v;
    if (count == 0 && row.eof()) continue;
    std::string extra;
    if (count != 4 || (row >> extra)) {
      throw std::invalid_argument("SMP table line " + std::to_string(line_no) + ": expected 4 numbers");
    }
    SmpSegment s{values[0], values[1] * kTwoPi, values[2], values[3] * kTwoPi};
    s.validate();
    out.push_back(s);
  }
  return out;
}

}  // namespace dfsim
