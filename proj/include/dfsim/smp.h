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

#ifndef DFSIM_SMP_H
#define DFSIM_SMP_H

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <vector>

#include "dfsim/linops.h"
#include "dfsim/sequences.h"
#include "dfsim/spin_system.h"

namespace dfsim {

/// One constant-amplitude piece of a strongly modulating pulse. The offset
/// enters as a detuning term -offset * Z added to H during the segment.
struct SmpSegment {
  double duration = 0.0;   // s
  double amplitude = 0.0;  // rad/s
  double phase = 0.0;      // rad
  double offset = 0.0;     // rad/s

  void validate() const;
  PulseEvent to_event() const;
};

Operator smp_propagator(const std::vector<SmpSegment>& segments, const SpinSystem& sys,
                        CouplingForm form = CouplingForm::kStrong);

/// |Tr(target^dag u)|^2 / d^2. Throws on dimension mismatch.
double gate_fidelity(const Operator& u, const Operator& target);

/// gate_fidelity of V^dag u V against a logical target, V the logical
/// isometry. Leakage out of the encoded space lowers the value.
double logical_gate_fidelity(const Operator& u, const Operator& logical_target, const DfsEncoding& enc);

struct SmpProblem {
  SpinSystem system{2};
  CouplingForm coupling = CouplingForm::kStrong;
  Operator target;
  /// When set, `target` acts on the encoded qubits and the objective is
  /// logical_gate_fidelity.
  std::optional<DfsEncoding> encoding;
  std::size_t n_segments = 4;
  double max_amplitude = 2.0 * kPi * 1e5;  // rad/s
  double duration_scale = 5e-6;           // s, typical segment length
  double offset_scale = 2.0 * kPi * 1e3;  // rad/s
  std::vector<SmpSegment> initial_guess;  // random start when empty
  std::size_t max_evaluations = 20000;
  std::size_t restarts = 4;
  double tolerance = 1e-10;  // simplex size at which a restart stops
  std::uint64_t seed = 0;

  void validate() const;
  double fidelity(const std::vector<SmpSegment>& segments) const;
};

struct SmpResult {
  std::vector<SmpSegment> segments;
  double fidelity = 0.0;
  double initial_fidelity = 0.0;  // of the first starting point
  std::vector<double> trace;      // best-so-far fidelity after each iteration
  std::size_t evaluations = 0;
  bool budget_exhausted = false;
};

/// Nelder-Mead over (log duration, amplitude, phase, offset) per segment,
/// amplitude kept in [0, max_amplitude]. Restart 0 starts from the initial
/// guess; later restarts from seeded random points. Deterministic for a
/// given problem.
SmpResult smp_search(const SmpProblem& problem);

/// Table rows "duration_s amplitude_hz phase_rad offset_hz"; '#' starts a comment.
void write_smp_table(std::ostream& os, const std::vector<SmpSegment>& segments);
std::vector<SmpSegment> read_smp_table(std::istream& is);

}  // namespace dfsim

#endif  // DFSIM_SMP_H
