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

#include "dfsim/sequences.h"

#include <cmath>
#include <stdexcept>
#include <utility>

namespace dfsim {

namespace {

bool is_timed(const PulseEvent& e) { return e.kind != EventKind::kIdealRotation; }

// Neumaier summation.
class CompensatedSum {
 public:
  void add(double x) {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x)) {
      c_ += (sum_ - t) + x;
    } else {
      c_ += (x - t) + sum_;
    }
    sum_ = t;
  }
  double value() const { return sum_ + c_; }

 private:
  double sum_ = 0.0;
  double c_ = 0.0;
};

// Common duration of all timed events, or 0 if they differ.
double uniform_duration(const std::vector<PulseEvent>& events) {
  double d = -1.0;
  for (const auto& e : events) {
    if (!is_timed(e)) continue;
    if (d < 0.0) {
      d = e.duration;
    } else if (e.duration != d) {
      return 0.0;
    }
  }
  return d < 0.0 ? 0.0 : d;
}

}  // namespace

PulseEvent PulseEvent::delay(double duration) {
  PulseEvent e;
  e.kind = EventKind::kDelay;
  e.duration = duration;
  e.validate();
  return e;
}

PulseEvent PulseEvent::rotation(double angle, double phase, std::vector<std::size_t> targets) {
  PulseEvent e;
  e.kind = EventKind::kIdealRotation;
  e.angle = angle;
  e.phase = phase;
  e.targets = std::move(targets);
  return e;
}

PulseEvent PulseEvent::segment(double duration, double amplitude, double phase, double offset,
                               std::vector<std::size_t> targets) {
  PulseEvent e;
  e.kind = EventKind::kSegment;
  e.duration = duration;
  e.amplitude = amplitude;
  e.phase = phase;
  e.offset = offset;
  e.targets = std::move(targets);
  e.validate();
  return e;
}

void PulseEvent::validate() const {
  if (!(duration >= 0.0) || !std::isfinite(duration)) {
    throw std::invalid_argument("event duration must be finite and non-negative");
  }
  if (kind == EventKind::kIdealRotation && duration != 0.0) {
    throw std::invalid_argument("ideal rotations have zero duration");
  }
  if (kind != EventKind::kIdealRotation && duration == 0.0) {
    throw std::invalid_argument("delays and segments need a positive duration");
  }
  if (kind == EventKind::kSegment && !(amplitude >= 0.0)) {
    throw std::invalid_argument("segment amplitude must be non-negative");
  }
}

std::vector<double> PulseSequence::event_start_times() const {
  std::vector<double> starts;
  starts.reserve(events.size());
  const double d = uniform_duration(events);
  if (d > 0.0) {
    std::size_t count = 0;
    for (const auto& e : events) {
      starts.push_back(static_cast<double>(count) * d);
      if (is_timed(e)) ++count;
    }
    return starts;
  }
  CompensatedSum t;
  for (const auto& e : events) {
    starts.push_back(t.value());
    t.add(e.duration);
  }
  return starts;
}

double PulseSequence::total_duration() const {
  const double d = uniform_duration(events);
  if (d > 0.0) {
    std::size_t count = 0;
    for (const auto& e : events) count += is_timed(e) ? 1 : 0;
    return static_cast<double>(count) * d;
  }
  CompensatedSum t;
  for (const auto& e : events) t.add(e.duration);
  return t.value();
}

bool PulseSequence::has_segments() const {
  for (const auto& e : events) {
    if (e.kind == EventKind::kSegment) return true;
  }
  return false;
}

PulseSequence build_cp(std::size_t n, double tau, bool with_wrappers) {
  if (n == 0) throw std::invalid_argument("build_cp: n must be at least 1");
  if (!(tau > 0.0)) throw std::invalid_argument("build_cp: tau must be positive");
  PulseSequence seq;
  seq.name = "cp";
  seq.cycles = n;
  seq.tau = tau;
  if (with_wrappers) seq.events.push_back(PulseEvent::rotation(kPi / 2.0, kPi / 2.0));
  for (std::size_t k = 0; k < n; ++k) {
    for (int half = 0; half < 2; ++half) {
      seq.events.push_back(PulseEvent::delay(tau));
      seq.events.push_back(PulseEvent::rotation(kPi, 0.0));
    }
  }
  if (with_wrappers) seq.events.push_back(PulseEvent::rotation(kPi / 2.0, -kPi / 2.0));
  return seq;
}

PulseSequence build_ts(std::size_t n, double tau) {
  if (n == 0) throw std::invalid_argument("build_ts: n must be at least 1");
  if (!(tau > 0.0)) throw std::invalid_argument("build_ts: tau must be positive");
  PulseSequence seq;
  seq.name = "ts";
  seq.cycles = n;
  seq.tau = tau;
  for (std::size_t k = 0; k < n; ++k) {
    for (std::size_t spin : {0U, 1U, 0U, 1U}) {
      seq.events.push_back(PulseEvent::delay(tau));
      seq.events.push_back(PulseEvent::rotation(kPi, 0.0, {spin}));
    }
  }
  return seq;
}

PulseSequence realize_rotations(const PulseSequence& seq, const RotationRealizer& realizer) {
  PulseSequence out;
  out.name = seq.name;
  out.cycles = seq.cycles;
  out.tau = seq.tau;
  for (const auto& e : seq.events) {
    if (e.kind != EventKind::kIdealRotation) {
      out.events.push_back(e);
      continue;
    }
    for (auto& r : realizer(e)) out.events.push_back(std::move(r));
  }
  return out;
}

PulseSequence realize_hard_pulses(const PulseSequence& seq, double pi_pulse_time) {
  if (!(pi_pulse_time > 0.0)) throw std::invalid_argument("pi pulse time must be positive");
  const double amplitude = kPi / pi_pulse_time;
  PulseSequence out = realize_rotations(seq, [amplitude](const PulseEvent& r) {
    double angle = r.angle;
    double phase = r.phase;
    if (angle < 0.0) {
      angle = -angle;
      phase += kPi;
    }
    if (angle == 0.0) return std::vector<PulseEvent>{};
    return std::vector<PulseEvent>{PulseEvent::segment(angle / amplitude, amplitude, phase, 0.0, r.targets)};
  });
  out.name = seq.name + "-hard";
  return out;
}

Operator rotation_unitary(const PulseEvent& rotation, std::size_t n_spins) {
  const Operator axis = std::cos(rotation.phase) * collective_x(n_spins, rotation.targets) +
                        std::sin(rotation.phase) * collective_y(n_spins, rotation.targets);
  return evolve_unitary(axis, rotation.angle);
}

Operator segment_hamiltonian(const PulseEvent& segment, const SpinSystem& sys) {
  Operator h = rf_hamiltonian(sys, segment.amplitude, segment.phase, segment.targets);
  if (segment.offset != 0.0) h -= segment.offset * collective_z(sys.n_spins());
  return h;
}

Operator sequence_propagator(const PulseSequence& seq, const SpinSystem& sys, const Operator& h_int) {
  Operator u = Operator::identity(sys.dim());
  for (const auto& e : seq.events) {
    switch (e.kind) {
      case EventKind::kDelay:
        u = evolve_unitary(h_int, e.duration) * u;
        break;
      case EventKind::kIdealRotation:
        u = rotation_unitary(e, sys.n_spins()) * u;
        break;
      case EventKind::kSegment:
        u = evolve_unitary(h_int + segment_hamiltonian(e, sys), e.duration) * u;
        break;
    }
  }
  return u;
}

CompiledSequence compile(const PulseSequence& seq, const SpinSystem& sys, const Operator& noise_gen,
                         CouplingForm form) {
  const Operator h_int = internal_hamiltonian(sys, form);
  const auto starts = seq.event_start_times();
  const double total = seq.total_duration();
  CompiledSequence out;
  Operator u_rf = Operator::identity(sys.dim());
  for (std::size_t k = 0; k < seq.events.size(); ++k) {
    const auto& e = seq.events[k];
    switch (e.kind) {
      case EventKind::kSegment:
        throw std::invalid_argument("compile: finite segments have no piecewise-constant toggling frame");
      case EventKind::kIdealRotation:
        u_rf = rotation_unitary(e, sys.n_spins()) * u_rf;
        break;
      case EventKind::kDelay: {
        // The interval ends where the next timed event starts.
        double end = total;
        for (std::size_t m = k + 1; m < seq.events.size(); ++m) {
          if (seq.events[m].kind != EventKind::kIdealRotation) {
            end = starts[m];
            break;
          }
        }
        const Operator u_dag = u_rf.adjoint();
        out.intervals.push_back(TogglingInterval{starts[k], end, u_dag * noise_gen * u_rf, u_dag * h_int * u_rf});
        break;
      }
    }
  }
  out.rf_propagator = u_rf;
  const double overlap = std::abs(u_rf.trace()) / static_cast<double>(u_rf.dim());
  out.cyclic = std::abs(overlap - 1.0) < 1e-9;
  return out;
}

Operator zeroth_avg_hamiltonian(const std::vector<TogglingInterval>& intervals) {
  if (intervals.empty()) throw std::invalid_argument("zeroth_avg_hamiltonian: no intervals");
  Operator sum = Operator::zero(intervals.front().hamiltonian.dim());
  double total = 0.0;
  for (const auto& iv : intervals) {
    sum += iv.length() * iv.hamiltonian;
    total += iv.length();
  }
  return (1.0 / total) * sum;
}

}  // namespace dfsim
