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

#include <gtest/gtest.h>

using namespace dfsim;

namespace {

std::size_t count_kind(const PulseSequence& s, EventKind k) {
  std::size_t c = 0;
  for (const auto& e : s.events) c += e.kind == k;
  return c;
}

}  // namespace

TEST(sequences, event_validation) {
  EXPECT_THROW(PulseEvent::delay(0.0).validate(), std::invalid_argument);
  EXPECT_THROW(PulseEvent::delay(-1.0).validate(), std::invalid_argument);
  EXPECT_THROW(PulseEvent::segment(1e-6, -1.0, 0.0).validate(), std::invalid_argument);
  EXPECT_NO_THROW(PulseEvent::rotation(kPi, 0.0).validate());
}

TEST(sequences, cp_structure) {
  const PulseSequence cp = build_cp(3, 0.1);
  EXPECT_EQ(count_kind(cp, EventKind::kDelay), 6u);
  EXPECT_EQ(count_kind(cp, EventKind::kIdealRotation), 8u);
  EXPECT_NEAR(cp.total_duration(), 0.6, 1e-15);
  EXPECT_EQ(build_cp(3, 0.1, false).events.size(), 12u);
  const auto starts = cp.event_start_times();
  EXPECT_DOUBLE_EQ(starts.back(), 0.6);
}

TEST(sequences, ts_structure) {
  const PulseSequence ts = build_ts(2, 0.25);
  EXPECT_EQ(count_kind(ts, EventKind::kDelay), 8u);
  EXPECT_EQ(count_kind(ts, EventKind::kIdealRotation), 8u);
  EXPECT_NEAR(ts.total_duration(), 2.0, 1e-15);
}

TEST(sequences, cyclic_sequences_return_to_lab_frame) {
  const SpinSystem sys = SpinSystem::two_spin(2 * kPi * 600, 50);
  const Operator z = noise_generator(sys);
  const CompiledSequence ts = compile(build_ts(2, 0.1), sys, z, CouplingForm::kWeak);
  EXPECT_TRUE(ts.cyclic);
  const CompiledSequence cp = compile(build_cp(2, 0.1, false), sys, z, CouplingForm::kWeak);
  EXPECT_TRUE(cp.cyclic);
  const CompiledSequence half = compile(build_cp(1, 0.1), sys, z, CouplingForm::kWeak);
  EXPECT_TRUE(half.cyclic);  // pi/2 pulses close back on themselves
}

TEST(sequences, ts_average_hamiltonian_vanishes) {
  const SpinSystem sys = SpinSystem::two_spin(2 * kPi * 600, 50);
  const CompiledSequence ts = compile(build_ts(1, 0.1), sys, noise_generator(sys), CouplingForm::kWeak);
  const Operator avg = zeroth_avg_hamiltonian(ts.intervals);
  // Offsets and the zz coupling both flip sign across the cycle.
  EXPECT_LT(avg.matrix().cwiseAbs().maxCoeff(), 1e-9);
  // Noise generators average to zero.
  Operator zsum = Operator::zero(4);
  for (const auto& iv : ts.intervals) zsum += iv.length() * iv.noise_generator;
  EXPECT_LT(zsum.matrix().cwiseAbs().maxCoeff(), 1e-12);
}

TEST(sequences, ts_toggling_pattern) {
  const SpinSystem sys(2);
  const CompiledSequence ts = compile(build_ts(1, 0.1), sys, noise_generator(sys), CouplingForm::kWeak);
  ASSERT_EQ(ts.intervals.size(), 4u);
  const Operator b1 = collective_z(2);
  const Operator b2 = 0.5 * (embed(pauli_z(), 1, 2) - embed(pauli_z(), 0, 2));
  EXPECT_LT(max_abs_diff(ts.intervals[0].noise_generator, b1), 1e-12);
  EXPECT_LT(max_abs_diff(ts.intervals[1].noise_generator, b2), 1e-12);
  EXPECT_LT(max_abs_diff(ts.intervals[2].noise_generator, -1.0 * b1), 1e-12);
  EXPECT_LT(max_abs_diff(ts.intervals[3].noise_generator, -1.0 * b2), 1e-12);
}

TEST(sequences, cp_is_logical_x_rotation) {
  const DfsEncoding enc(2, {{0, 1}});
  const Matrix v = logical_isometry(enc);
  const Matrix xl = v.adjoint() * logical_paulis(enc, 0).x.matrix() * v;
  for (double phi : {kPi / 2, kPi}) {
    const std::size_t n = 3;
    const double tau = phi / (2 * n * kPi * 50);
    const SpinSystem sys = SpinSystem::two_spin(2 * kPi * 600, 50);
    const Operator u = sequence_propagator(build_cp(n, tau), sys, internal_hamiltonian(sys, CouplingForm::kWeak));
    const Matrix r = v.adjoint() * u.matrix() * v;
    const Matrix target = std::cos(phi / 2) * Matrix::Identity(2, 2) - Complex(0, std::sin(phi / 2)) * xl;
    const Complex phase = (target.adjoint() * r).trace() / 2.0;
    EXPECT_NEAR(std::abs(phase), 1.0, 1e-9);
    EXPECT_LT((r - phase * target).cwiseAbs().maxCoeff(), 1e-9);
  }
}

TEST(sequences, hard_pulses_replace_rotations) {
  const PulseSequence hp = realize_hard_pulses(build_cp(1, 1e-3), 2e-6);
  EXPECT_EQ(count_kind(hp, EventKind::kIdealRotation), 0u);
  EXPECT_EQ(count_kind(hp, EventKind::kSegment), 4u);
  EXPECT_NEAR(hp.total_duration(), 2e-3 + 2 * 2e-6 + 2 * 1e-6, 1e-15);
  // A hard pi pulse with no internal Hamiltonian is the ideal rotation.
  const SpinSystem sys(2);
  const Operator ideal = rotation_unitary(PulseEvent::rotation(kPi, 0.3), 2);
  PulseSequence one;
  one.events.push_back(PulseEvent::rotation(kPi, 0.3));
  const Operator real = sequence_propagator(realize_hard_pulses(one, 2e-6), sys, Operator::zero(4));
  EXPECT_LT(max_abs_diff(ideal, real), 1e-12);
  EXPECT_THROW(compile(hp, sys, noise_generator(sys), CouplingForm::kWeak), std::invalid_argument);
}

TEST(sequences, negative_angle_maps_to_phase_shift) {
  const SpinSystem sys(2);
  PulseSequence one;
  one.events.push_back(PulseEvent::rotation(-kPi / 2, kPi / 2));
  const Operator real = sequence_propagator(realize_hard_pulses(one, 2e-6), sys, Operator::zero(4));
  EXPECT_LT(max_abs_diff(rotation_unitary(one.events[0], 2), real), 1e-12);
}
