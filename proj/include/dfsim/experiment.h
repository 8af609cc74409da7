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

#ifndef DFSIM_EXPERIMENT_H
#define DFSIM_EXPERIMENT_H

#include <atomic>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "dfsim/spin_system.h"

namespace dfsim {

enum class Mode { kLeakageSweep, kPipulseDephasing, kDdFidelity, kMcVsAnalytic, kSmpCompare };

const char* mode_name(Mode m);

struct Violation {
  enum class Severity { kError, kWarning };
  Severity severity = Severity::kError;
  std::string field;
  std::string message;
};

std::string to_string(const Violation& v);
bool has_errors(const std::vector<Violation>& vs);

struct SystemSpec {
  std::vector<double> offsets_hz;  // multiplied by 2 pi
  std::vector<std::vector<double>> couplings_hz;
  std::vector<double> noise_weights;
  CouplingForm coupling = CouplingForm::kWeak;

  SpinSystem build() const;
};

struct ExperimentConfig {
  std::optional<Mode> mode;
  std::uint64_t seed = 0;
  std::string output_dir = ".";
  std::size_t threads = 1;
  std::string omega_unit = "rad_s";  // or hz_times_2pi; applies to noise.strength

  SystemSpec system;

  std::optional<double> noise_strength;
  std::vector<double> tau_c_grid;

  std::vector<std::string> sequences;  // cp, ts, hard-pi, smp-file
  std::vector<std::size_t> cycles;
  double total_time = 4.0;
  double hard_pi_time = 2e-6;
  std::string smp_file;

  std::size_t n_traj = 0;
  double dt = 0.0;  // zero selects the default bound

  // leakage-sweep
  double j_hz = 50.0;
  double omega_rf_over_j = 500.0;
  std::vector<double> ratios;
  std::size_t steps = 200;

  // pipulse-dephasing
  double omega_rf = 2.0 * kPi * 1e4;  // rad/s
  std::vector<double> inv_omega_t2;
  std::vector<std::string> states{"identity", "x", "y", "z"};

  // smp-compare
  std::vector<std::string> realizations{"ideal", "hard-pi", "smp"};

  /// Noise strength in rad/s after applying omega_unit.
  double strength_rad_s() const;
};

struct ParseResult {
  ExperimentConfig config;
  std::vector<Violation> violations;
};

/// Parses YAML text; structural problems (wrong types, unknown keys) are
/// reported as violations rather than thrown.
ParseResult parse_config(const std::string& yaml_text);
/// Reads and parses a config file; a relative smp_file is resolved against
/// the file's directory.
ParseResult load_config(const std::string& path);

/// Pure check of mode-required fields and value ranges.
std::vector<Violation> validate(const ExperimentConfig& cfg);

struct RunOptions {
  const std::atomic<bool>* interrupt = nullptr;
  std::ostream* log = nullptr;
};

struct RunSummary {
  std::vector<std::string> files;
  std::size_t rows = 0;
  bool interrupted = false;
  std::string json;  // also written to <output_dir>/summary.json
};

/// Runs the experiment, writing <output_dir>/<mode>.csv (plus any
/// secondary tables) and summary.json. Throws std::invalid_argument if the
/// configuration has errors.
RunSummary run_experiment(const ExperimentConfig& cfg, const RunOptions& opts = {});

/// Column names of the main CSV for each mode.
std::vector<std::string> csv_columns(Mode m);

}  // namespace dfsim

#endif  // DFSIM_EXPERIMENT_H
