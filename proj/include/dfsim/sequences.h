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

#ifndef DFSIM_SEQUENCES_H
#define DFSIM_SEQUENCES_H

#include <cstddef>
#include <functional>
#include <string>
#include <vector>

#include "dfsim/linops.h"
#include "dfsim/spin_system.h"

namespace dfsim {

enum class EventKind { kDelay, kIdealRotation, kSegment };

/// One element of a pulse sequence. Phases are measured from the x axis in
/// the transverse plane (0 = x, pi/2 = y). An empty target list means every spin.
struct PulseEvent {
  EventKind kind = EventKind::kDelay;
  double duration = 0.0;  // s
  std::vector<std::size_t> targets;
  double phase = 0.0;      // rad
  double angle = 0.0;      // rad, ideal rotations only
  double amplitude = 0.0;  // rad/s, segments only
  double offset = 0.0;     // rad/s detuning, segments only

  static PulseEvent delay(double duration);
  static PulseEvent rotation(double angle, double phase, std::vector<std::size_t> targets = {});
  static PulseEvent segment(double duration, double amplitude, double phase, double offset = 0.0,
                            std::vector<std::size_t> targets = {});

  void validate() const;
};

struct PulseSequence {
  std::string name;
  std::vector<PulseEvent> events;
  std::size_t cycles = 0;
  double tau = 0.0;  // delay spacing for templated sequences

  /// Start time of every event. When all timed events share one duration the
  /// times are index * duration, otherwise a compensated running sum.
  std::vector<double> event_start_times() const;
  double total_duration() const;
  bool has_segments() const;
};

/// [pi/2]_y (-tau-[pi]_x-tau-[pi]_x)^n [pi/2]_-y with collective ideal pulses;
/// the wrappers are omitted when `with_wrappers` is false.
PulseSequence build_cp(std::size_t n, double tau, bool with_wrappers = true);

/// (-tau-[pi]_x^1-tau-[pi]_x^2-tau-[pi]_x^1-tau-[pi]_x^2)^n for spins 0 and 1.
PulseSequence build_ts(std::size_t n, double tau);

/// Maps each ideal rotation to zero or more replacement events; delays and
/// segments are kept.
using RotationRealizer = std::function<std::vector<PulseEvent>(const PulseEvent&)>;
PulseSequence realize_rotations(const PulseSequence& seq, const RotationRealizer& realizer);

/// Finite rectangular pulses with amplitude pi / pi_pulse_time.
PulseSequence realize_hard_pulses(const PulseSequence& seq, double pi_pulse_time);

inline constexpr double kDefaultHardPiPulseTime = 2e-6;

/// exp(-i angle (cos(phase) X_S + sin(phase) Y_S)).
Operator rotation_unitary(const PulseEvent& rotation, std::size_t n_spins);

/// Control Hamiltonian of a segment: RF plus the -offset * Z detuning term.
Operator segment_hamiltonian(const PulseEvent& segment, const SpinSystem& sys);

/// Noiseless propagator of the whole sequence under `h_int`.
Operator sequence_propagator(const PulseSequence& seq, const SpinSystem& sys, const Operator& h_int);

/// Piecewise-constant toggling-frame description of one delay: the noise
/// generator and the deterministic Hamiltonian seen through the RF propagator.
/// Intervals are half-open [start, end).
struct TogglingInterval {
  double start = 0.0;
  double end = 0.0;
  Operator noise_generator;
  Operator hamiltonian;

  double length() const { return end - start; }
};

struct CompiledSequence {
  std::vector<TogglingInterval> intervals;
  Operator rf_propagator;  // U_rf at the end of the sequence
  bool cyclic = true;      // U_rf proportional to the identity
};

/// Toggling-frame intervals of a sequence made of delays and ideal rotations.
/// Throws std::invalid_argument on finite segments.
CompiledSequence compile(const PulseSequence& seq, const SpinSystem& sys, const Operator& noise_gen,
                         CouplingForm form);

/// Time-weighted mean of the interval Hamiltonians.
Operator zeroth_avg_hamiltonian(const std::vector<TogglingInterval>& intervals);

}  // namespace dfsim

#endif  // DFSIM_SEQUENCES_H
