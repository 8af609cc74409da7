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

// Command-line front end: dfsim run <config> | dfsim validate <config>.

#include <atomic>
#include <csignal>
#include <iostream>
#include <string>

#include "CLI11.hpp"

#include "dfsim/experiment.h"

namespace {

std::atomic<bool> g_interrupt{false};

extern "C" void on_sigint(int) { g_interrupt.store(true); }

int print_violations(const std::vector<dfsim::Violation>& vs) {
  for (const auto& v : vs) std::cerr << dfsim::to_string(v) << '\n';
  return dfsim::has_errors(vs) ? 2 : 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Decoherence-free qubit control simulator"};
  app.require_subcommand(1);

  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::string out_dir;
  std::optional<std::size_t> threads;
  bool quiet = false;

  auto* run = app.add_subcommand("run", "Run the experiment described by a config file");
  run->add_option("config", config_path, "YAML experiment config")->required()->check(CLI::ExistingFile);
  run->add_option("--seed", seed, "Override the config seed");
  run->add_option("--out", out_dir, "Override the output directory");
  run->add_option("--threads", threads, "Worker threads (0 = all cores)");
  run->add_flag("-q,--quiet", quiet, "No progress output");

  auto* check = app.add_subcommand("validate", "Check a config file without running it");
  check->add_option("config", config_path, "YAML experiment config")->required()->check(CLI::ExistingFile);

  CLI11_PARSE(app, argc, argv);

  dfsim::ParseResult parsed = dfsim::load_config(config_path);
  if (seed) parsed.config.seed = *seed;
  if (!out_dir.empty()) parsed.config.output_dir = out_dir;
  if (threads) parsed.config.threads = *threads;

  auto violations = parsed.violations;
  if (!dfsim::has_errors(violations)) {
    const auto more = dfsim::validate(parsed.config);
    violations.insert(violations.end(), more.begin(), more.end());
  }

  if (check->parsed()) {
    const int rc = print_violations(violations);
    if (rc == 0) std::cout << "ok\n";
    return rc;
  }

  if (dfsim::has_errors(violations)) return print_violations(violations);
  print_violations(violations);

  std::signal(SIGINT, on_sigint);
  try {
    dfsim::RunOptions opts;
    opts.interrupt = &g_interrupt;
    opts.log = quiet ? nullptr : &std::cerr;
    const dfsim::RunSummary summary = dfsim::run_experiment(parsed.config, opts);
    std::cout << summary.json << '\n';
    return summary.interrupted ? 130 : 0;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
