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

#include "dfsim/experiment.h"

#include <yaml-cpp/yaml.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <limits>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

#include "dfsim/cumulant.h"
#include "dfsim/montecarlo.h"
#include "dfsim/noise.h"
#include "dfsim/sequences.h"
#include "dfsim/smp.h"

namespace dfsim {

namespace {

constexpr double kTwoPi = 2.0 * kPi;
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

const std::map<std::string, Mode>& mode_table() {
  static const std::map<std::string, Mode> t{{"leakage-sweep", Mode::kLeakageSweep},
                                             {"pipulse-dephasing", Mode::kPipulseDephasing},
                                             {"dd-fidelity", Mode::kDdFidelity},
                                             {"mc-vs-analytic", Mode::kMcVsAnalytic},
                                             {"smp-compare", Mode::kSmpCompare}};
  return t;
}

// ---- YAML reading -------------------------------------------------------

class Reader {
 public:
  explicit Reader(std::vector<Violation>& out) : out_(out) {}

  void error(const std::string& field, const std::string& msg) {
    out_.push_back({Violation::Severity::kError, field, msg});
  }
  void warn(const std::string& field, const std::string& msg) {
    out_.push_back({Violation::Severity::kWarning, field, msg});
  }

  void check_keys(const YAML::Node& n, const std::string& path, const std::set<std::string>& known) {
    if (!n.IsMap()) {
      error(path, "expected a mapping");
      return;
    }
    for (const auto& kv : n) {
      const auto key = kv.first.as<std::string>();
      if (!known.count(key)) warn(path.empty() ? key : path + "." + key, "unknown key ignored");
    }
  }

  template <typename T>
  void scalar(const YAML::Node& n, const std::string& field, T& dst) {
    if (!n) return;
    try {
      dst = n.as<T>();
    } catch (const YAML::Exception&) {
      error(field, "has the wrong type");
    }
  }

  template <typename T>
  void list(const YAML::Node& n, const std::string& field, std::vector<T>& dst) {
    if (!n) return;
    if (!n.IsSequence()) {
      error(field, "expected a list");
      return;
    }
    try {
      dst = n.as<std::vector<T>>();
    } catch (const YAML::Exception&) {
      error(field, "list has elements of the wrong type");
    }
  }

  // A list of numbers, or {log_start, log_stop, points} (decades) or
  // {start, stop, points} (linear).
  void grid(const YAML::Node& n, const std::string& field, std::vector<double>& dst) {
    if (!n) return;
    if (n.IsSequence()) return list(n, field, dst);
    if (!n.IsMap()) return error(field, "expected a list or a range mapping");
    check_keys(n, field, {"log_start", "log_stop", "start", "stop", "points"});
    std::size_t points = 0;
    scalar(n["points"], field + ".points", points);
    const bool log = static_cast<bool>(n["log_start"]);
    double a = 0.0, b = 0.0;
    scalar(n[log ? "log_start" : "start"], field, a);
    scalar(n[log ? "log_stop" : "stop"], field, b);
    if (!n[log ? "log_stop" : "stop"]) return error(field, "range needs both ends");
    if (points == 0) return error(field + ".points", "must be at least 1");
    dst.clear();
    for (std::size_t k = 0; k < points; ++k) {
      const double f = points == 1 ? 0.0 : static_cast<double>(k) / static_cast<double>(points - 1);
      const double v = a + (b - a) * f;
      dst.push_back(log ? std::pow(10.0, v) : v);
    }
  }

 private:
  std::vector<Violation>& out_;
};

ParseResult parse_node(const YAML::Node& root) {
  ParseResult res;
  Reader r(res.violations);
  ExperimentConfig& c = res.config;
  if (!root || root.IsNull()) {
    r.error("", "empty configuration");
    return res;
  }
  r.check_keys(root, "", {"mode", "seed", "output", "threads", "omega_unit", "system", "noise", "sequence",
                          "montecarlo", "leakage", "pipulse", "smp_compare"});
  if (!root.IsMap()) return res;

  if (root["mode"]) {
    std::string m;
    r.scalar(root["mode"], "mode", m);
    if (auto it = mode_table().find(m); it != mode_table().end()) {
      c.mode = it->second;
    } else {
      r.error("mode", "unknown mode '" + m + "'");
    }
  }
  r.scalar(root["seed"], "seed", c.seed);
  r.scalar(root["output"], "output", c.output_dir);
  r.scalar(root["threads"], "threads", c.threads);
  r.scalar(root["omega_unit"], "omega_unit", c.omega_unit);

  if (const auto s = root["system"]) {
    r.check_keys(s, "system", {"offsets_hz", "couplings_hz", "noise_weights", "coupling"});
    r.list(s["offsets_hz"], "system.offsets_hz", c.system.offsets_hz);
    if (s["couplings_hz"]) {
      try {
        c.system.couplings_hz = s["couplings_hz"].as<std::vector<std::vector<double>>>();
      } catch (const YAML::Exception&) {
        r.error("system.couplings_hz", "expected a matrix of numbers");
      }
    }
    r.list(s["noise_weights"], "system.noise_weights", c.system.noise_weights);
    std::string form = "weak";
    r.scalar(s["coupling"], "system.coupling", form);
    if (form == "weak") {
      c.system.coupling = CouplingForm::kWeak;
    } else if (form == "strong") {
      c.system.coupling = CouplingForm::kStrong;
    } else {
      r.error("system.coupling", "must be 'weak' or 'strong'");
    }
  }
  if (const auto n = root["noise"]) {
    r.check_keys(n, "noise", {"strength", "tau_c_s"});
    if (n["strength"]) {
      double v = 0.0;
      r.scalar(n["strength"], "noise.strength", v);
      c.noise_strength = v;
    }
    r.grid(n["tau_c_s"], "noise.tau_c_s", c.tau_c_grid);
  }
  if (const auto s = root["sequence"]) {
    r.check_keys(s, "sequence", {"templates", "cycles", "total_time_s", "hard_pi_time_s", "smp_file"});
    r.list(s["templates"], "sequence.templates", c.sequences);
    r.list(s["cycles"], "sequence.cycles", c.cycles);
    r.scalar(s["total_time_s"], "sequence.total_time_s", c.total_time);
    r.scalar(s["hard_pi_time_s"], "sequence.hard_pi_time_s", c.hard_pi_time);
    r.scalar(s["smp_file"], "sequence.smp_file", c.smp_file);
  }
  if (const auto m = root["montecarlo"]) {
    r.check_keys(m, "montecarlo", {"n_traj", "dt_s"});
    r.scalar(m["n_traj"], "montecarlo.n_traj", c.n_traj);
    r.scalar(m["dt_s"], "montecarlo.dt_s", c.dt);
  }
  if (const auto l = root["leakage"]) {
    r.check_keys(l, "leakage", {"j_hz", "omega_rf_over_j", "ratios", "steps"});
    r.scalar(l["j_hz"], "leakage.j_hz", c.j_hz);
    r.scalar(l["omega_rf_over_j"], "leakage.omega_rf_over_j", c.omega_rf_over_j);
    r.grid(l["ratios"], "leakage.ratios", c.ratios);
    r.scalar(l["steps"], "leakage.steps", c.steps);
  }
  if (const auto p = root["pipulse"]) {
    r.check_keys(p, "pipulse", {"omega_rf_rad_s", "inv_omega_t2", "states"});
    r.scalar(p["omega_rf_rad_s"], "pipulse.omega_rf_rad_s", c.omega_rf);
    r.grid(p["inv_omega_t2"], "pipulse.inv_omega_t2", c.inv_omega_t2);
    r.list(p["states"], "pipulse.states", c.states);
  }
  if (const auto s = root["smp_compare"]) {
    r.check_keys(s, "smp_compare", {"realizations"});
    r.list(s["realizations"], "smp_compare.realizations", c.realizations);
  }
  return res;
}

// ---- output ---------------------------------------------------------------

std::string fmt(double v) {
  if (std::isnan(v)) return "nan";
  std::ostringstream os;
  os << std::setprecision(17) << v;
  return os.str();
}

class CsvWriter {
 public:
  CsvWriter(const std::filesystem::path& path, const std::vector<std::string>& columns)
      : os_(path), width_(columns.size()) {
    if (!os_) throw std::runtime_error("cannot open " + path.string() + " for writing");
    write(columns);
  }

  void row(const std::vector<std::string>& fields) {
    if (fields.size() != width_) throw std::logic_error("CSV row width mismatch");
    write(fields);
    ++rows_;
  }

  std::size_t rows() const { return rows_; }

 private:
  void write(const std::vector<std::string>& fields) {
    for (std::size_t i = 0; i < fields.size(); ++i) os_ << (i ? "," : "") << fields[i];
    os_ << '\n';
    os_.flush();
  }

  std::ofstream os_;
  std::size_t width_;
  std::size_t rows_ = 0;
};

// ---- experiment helpers ------------------------------------------------------

struct Context {
  const ExperimentConfig& cfg;
  const RunOptions& opts;
  std::filesystem::path dir;
  RunSummary summary;
  nlohmann::json extra = nlohmann::json::object();
  std::uint64_t point = 0;

  bool interrupted() {
    if (opts.interrupt && opts.interrupt->load()) summary.interrupted = true;
    return summary.interrupted;
  }
  void log(const std::string& msg) const {
    if (opts.log) *opts.log << msg << '\n';
  }
  // Master seed for the next grid point.
  std::uint64_t next_seed() { return RngPolicy(cfg.seed).stream(point++)(); }
  CsvWriter open(const std::string& name, const std::vector<std::string>& cols) {
    summary.files.push_back((dir / name).string());
    return CsvWriter(dir / name, cols);
  }
};

bool is_pi(const PulseEvent& e) { return std::abs(std::abs(e.angle) - kPi) < 1e-12; }

PulseEvent hard_pulse(const PulseEvent& rotation, double pi_time) {
  PulseSequence one;
  one.events.push_back(rotation);
  return realize_hard_pulses(one, pi_time).events.front();
}

struct Scenario {
  PulseSequence ideal;      // ideal-pulse sequence (reference)
  PulseSequence realized;   // what is simulated
  double analytic = kNaN;
};

Scenario make_scenario(const ExperimentConfig& c, const std::string& name, std::size_t n, double tau_c,
                       const std::vector<SmpSegment>& smp, std::size_t n_spins) {
  Scenario s;
  const double omega = c.strength_rad_s();
  const bool two = n_spins == 2;
  if (name == "ts") {
    const double tau = c.total_time / (4.0 * static_cast<double>(n));
    s.ideal = build_ts(n, tau);
    if (two) {
      const TsZetas z = ts_zetas(omega, tau_c, n, tau);
      s.analytic = ts_fidelity(z.zeta1, z.zeta2, n, tau);
    }
  } else {
    const double tau = c.total_time / (2.0 * static_cast<double>(n));
    s.ideal = build_cp(n, tau);
    if (two) s.analytic = cp_fidelity(cp_zeta(omega, tau_c, n, tau), n, tau);
  }
  s.realized = s.ideal;
  if (name == "hard-pi" || name == "hard") {
    s.realized = realize_hard_pulses(s.ideal, c.hard_pi_time);
  } else if (name == "smp-file" || name == "smp") {
    s.realized = realize_rotations(s.ideal, [&](const PulseEvent& e) {
      if (!is_pi(e) || !e.targets.empty()) return std::vector<PulseEvent>{hard_pulse(e, c.hard_pi_time)};
      std::vector<PulseEvent> out;
      for (const auto& seg : smp) out.push_back(seg.to_event());
      return out;
    });
    s.realized.name = s.ideal.name + "+smp";
  }
  return s;
}

std::vector<SmpSegment> load_smp(const ExperimentConfig& c) {
  std::ifstream is(c.smp_file);
  if (!is) throw std::invalid_argument("cannot open SMP table " + c.smp_file);
  return read_smp_table(is);
}

bool needs_smp(const ExperimentConfig& c) {
  const auto& names = c.mode == Mode::kSmpCompare ? c.realizations : c.sequences;
  for (const auto& n : names) {
    if (n == "smp" || n == "smp-file") return true;
  }
  return false;
}

SimConfig sim_for(Context& ctx, const SpinSystem& sys, const PulseSequence& seq, double tau_c) {
  SimConfig sc;
  sc.system = sys;
  sc.coupling = ctx.cfg.system.coupling;
  sc.sequence = seq;
  sc.noise = OuParams{ctx.cfg.strength_rad_s(), tau_c};
  sc.dt = ctx.cfg.dt;
  sc.n_traj = std::max<std::size_t>(ctx.cfg.n_traj, 1);
  sc.rng = RngPolicy(ctx.next_seed());
  sc.threads = ctx.cfg.threads;
  return sc;
}

// ---- modes ---------------------------------------------------------------------

void run_leakage(Context& ctx) {
  const ExperimentConfig& c = ctx.cfg;
  auto main = ctx.open("leakage-sweep.csv", csv_columns(Mode::kLeakageSweep));
  auto series = ctx.open("leakage-sweep_series.csv", {"delta_omega_over_omega_rf", "t_s", "p"});
  const double omega_rf = c.omega_rf_over_j * kTwoPi * c.j_hz;
  const double t_p = kPi / omega_rf;
  const DfsEncoding enc(2, {{0, 1}});
  const Operator rho0 = logical_paulis(enc, 0).z;
  for (double ratio : c.ratios) {
    if (ctx.interrupted()) break;
    const double d_omega = ratio * omega_rf;
    SimConfig sc;
    sc.system = SpinSystem::two_spin(d_omega, c.j_hz);
    sc.coupling = CouplingForm::kStrong;
    sc.sequence.name = "collective-pi";
    sc.sequence.events.push_back(PulseEvent::segment(t_p, omega_rf, 0.0));
    sc.noise = OuParams{0.0, std::numeric_limits<double>::infinity()};
    sc.dt = t_p / static_cast<double>(c.steps);
    const ObservableSeries obs = observable_series(sc, rho0, std::nullopt, enc);
    double p_min = 1.0;
    for (std::size_t k = 0; k < obs.times.size(); ++k) {
      p_min = std::min(p_min, obs.leakage[k]);
      series.row({fmt(ratio), fmt(obs.times[k]), fmt(obs.leakage[k])});
    }
    main.row({fmt(ratio), fmt(d_omega), fmt(omega_rf), fmt(t_p), fmt(obs.leakage.back()), fmt(p_min)});
    ctx.log("leakage ratio " + fmt(ratio) + ": p(t_p) = " + fmt(obs.leakage.back()));
  }
  ctx.summary.rows = main.rows();
}

void run_pipulse(Context& ctx) {
  const ExperimentConfig& c = ctx.cfg;
  auto out = ctx.open("pipulse-dephasing.csv", csv_columns(Mode::kPipulseDephasing));
  const DfsEncoding enc(2, {{0, 1}});
  const LogicalPaulis lp = logical_paulis(enc, 0);
  const std::map<std::string, Operator> states{{"identity", lp.identity}, {"x", lp.x}, {"y", lp.y}, {"z", lp.z}};
  for (double x : c.inv_omega_t2) {
    if (ctx.interrupted()) break;
    const double t2 = 1.0 / (x * c.omega_rf);
    for (const auto& name : c.states) {
      const PurityCorrelation pc = lindblad_pi_pulse(t2, c.omega_rf, states.at(name));
      out.row({fmt(x), name, fmt(pc.purity), fmt(pc.correlation)});
    }
  }
  ctx.summary.rows = out.rows();
}

void run_dd(Context& ctx, bool compare) {
  const ExperimentConfig& c = ctx.cfg;
  const Mode mode = compare ? Mode::kMcVsAnalytic : Mode::kDdFidelity;
  auto out = ctx.open(std::string(mode_name(mode)) + ".csv", csv_columns(mode));
  const SpinSystem sys = c.system.build();
  const std::vector<SmpSegment> smp = needs_smp(c) ? load_smp(c) : std::vector<SmpSegment>{};
  bool all_ok = true;
  double worst = 0.0;
  for (const auto& name : c.sequences) {
    for (std::size_t n : c.cycles) {
      for (double tau_c : c.tau_c_grid) {
        if (ctx.interrupted()) break;
        const Scenario sc = make_scenario(c, name, n, tau_c, smp, sys.n_spins());
        double f_mc = kNaN, se = kNaN;
        if (c.n_traj > 0) {
          SimConfig sim = sim_for(ctx, sys, sc.realized, tau_c);
          SimConfig ref = sim;
          ref.sequence = sc.ideal;
          const EnsembleResult er = average_superpropagator(sim, noiseless_propagator(ref));
          f_mc = er.fidelity;
          se = er.fidelity_stderr;
        }
        ctx.log(name + " n=" + std::to_string(n) + " tau_c=" + fmt(tau_c) + ": analytic " + fmt(sc.analytic) +
                ", mc " + fmt(f_mc) + " +- " + fmt(se));
        if (!compare) {
          out.row({fmt(tau_c), fmt(sc.analytic), fmt(f_mc), fmt(se), name, std::to_string(n)});
          continue;
        }
        const double dev = std::abs(f_mc - sc.analytic);
        const double z = se > 0.0 ? dev / se : (dev == 0.0 ? 0.0 : std::numeric_limits<double>::infinity());
        const bool ok = dev <= 3.0 * se || dev <= 1e-12;
        all_ok = all_ok && ok;
        worst = std::max(worst, z);
        out.row({fmt(tau_c), name, std::to_string(n), fmt(sc.analytic), fmt(f_mc), fmt(se), fmt(z),
                 ok ? "1" : "0"});
      }
    }
  }
  if (compare) {
    ctx.extra["all_within_3_stderr"] = all_ok;
    ctx.extra["max_deviation_in_stderr"] = worst;
  }
  ctx.summary.rows = out.rows();
}

void run_smp_compare(Context& ctx) {
  const ExperimentConfig& c = ctx.cfg;
  auto out = ctx.open("smp-compare.csv", csv_columns(Mode::kSmpCompare));
  const SpinSystem sys = c.system.build();
  const std::vector<SmpSegment> smp = needs_smp(c) ? load_smp(c) : std::vector<SmpSegment>{};
  for (const auto& real : c.realizations) {
    for (std::size_t n : c.cycles) {
      for (double tau_c : c.tau_c_grid) {
        if (ctx.interrupted()) break;
        const std::string seq_name = real == "ideal" ? "cp" : real;
        const Scenario sc = make_scenario(c, seq_name, n, tau_c, smp, sys.n_spins());
        SimConfig sim = sim_for(ctx, sys, sc.realized, tau_c);
        SimConfig ref = sim;
        ref.sequence = sc.ideal;
        const Operator target = noiseless_propagator(ref);
        const double noiseless = gate_fidelity(noiseless_propagator(sim), target);
        const EnsembleResult er = average_superpropagator(sim, target);
        out.row({fmt(tau_c), real, std::to_string(n), fmt(er.fidelity), fmt(er.fidelity_stderr), fmt(noiseless)});
        ctx.log(real + " n=" + std::to_string(n) + " tau_c=" + fmt(tau_c) + ": " + fmt(er.fidelity));
      }
    }
  }
  ctx.summary.rows = out.rows();
}

}  // namespace

const char* mode_name(Mode m) {
  switch (m) {
    case Mode::kLeakageSweep: return "leakage-sweep";
    case Mode::kPipulseDephasing: return "pipulse-dephasing";
    case Mode::kDdFidelity: return "dd-fidelity";
    case Mode::kMcVsAnalytic: return "mc-vs-analytic";
    case Mode::kSmpCompare: return "smp-compare";
  }
  return "unknown";
}

std::string to_string(const Violation& v) {
  return std::string(v.severity == Violation::Severity::kError ? "error" : "warning") + ": " +
         (v.field.empty() ? "<root>" : v.field) + ": " + v.message;
}

bool has_errors(const std::vector<Violation>& vs) {
  for (const auto& v : vs) {
    if (v.severity == Violation::Severity::kError) return true;
  }
  return false;
}

SpinSystem SystemSpec::build() const {
  if (offsets_hz.empty()) return SpinSystem::two_spin(kTwoPi * 600.0, 50.0);
  std::vector<double> offsets;
  for (double v : offsets_hz) offsets.push_back(kTwoPi * v);
  auto couplings = couplings_hz;
  if (couplings.empty()) couplings.assign(offsets.size(), std::vector<double>(offsets.size(), 0.0));
  return SpinSystem(std::move(offsets), std::move(couplings), noise_weights);
}

double ExperimentConfig::strength_rad_s() const {
  const double s = noise_strength.value_or(0.0);
  return omega_unit == "hz_times_2pi" ? kTwoPi * s : s;
}

ParseResult parse_config(const std::string& yaml_text) {
  try {
    return parse_node(YAML::Load(yaml_text));
  } catch (const YAML::Exception& e) {
    ParseResult r;
    r.violations.push_back({Violation::Severity::kError, "", std::string("YAML syntax: ") + e.what()});
    return r;
  }
}

ParseResult load_config(const std::string& path) {
  std::ifstream is(path);
  if (!is) {
    ParseResult r;
    r.violations.push_back({Violation::Severity::kError, "", "cannot read " + path});
    return r;
  }
  std::ostringstream ss;
  ss << is.rdbuf();
  ParseResult r = parse_config(ss.str());
  // Relative table paths are relative to the config file.
  if (!r.config.smp_file.empty() && std::filesystem::path(r.config.smp_file).is_relative()) {
    r.config.smp_file = (std::filesystem::path(path).parent_path() / r.config.smp_file).string();
  }
  return r;
}

std::vector<std::string> csv_columns(Mode m) {
  switch (m) {
    case Mode::kLeakageSweep:
      return {"delta_omega_over_omega_rf", "delta_omega_rad_s", "omega_rf_rad_s", "t_p_s", "p_tp", "p_min"};
    case Mode::kPipulseDephasing: return {"inv_omega_rf_t2", "state", "purity", "correlation"};
    case Mode::kDdFidelity: return {"tau_c_s", "fidelity_analytic", "fidelity_mc", "stderr", "sequence", "n_cycles"};
    case Mode::kMcVsAnalytic:
      return {"tau_c_s", "sequence", "n_cycles", "fidelity_analytic", "fidelity_mc", "stderr",
              "deviation_in_stderr", "within_3_stderr"};
    case Mode::kSmpCompare:
      return {"tau_c_s", "realization", "n_cycles", "fidelity_mc", "stderr", "noiseless_fidelity"};
  }
  return {};
}

std::vector<Violation> validate(const ExperimentConfig& c) {
  std::vector<Violation> v;
  auto err = [&](const std::string& f, const std::string& m) { v.push_back({Violation::Severity::kError, f, m}); };
  auto warn = [&](const std::string& f, const std::string& m) { v.push_back({Violation::Severity::kWarning, f, m}); };

  if (!c.mode) {
    err("mode", "missing");
    return v;
  }
  if (c.omega_unit != "rad_s" && c.omega_unit != "hz_times_2pi") err("omega_unit", "must be rad_s or hz_times_2pi");
  if (c.threads == 0) warn("threads", "0 selects the hardware concurrency");

  const Mode m = *c.mode;
  if (m == Mode::kLeakageSweep) {
    if (c.ratios.empty()) err("leakage.ratios", "sweep grid is empty");
    for (double r : c.ratios) {
      if (!(r >= 0.0) || !std::isfinite(r)) err("leakage.ratios", "ratios must be finite and non-negative");
    }
    if (!(c.j_hz > 0.0)) err("leakage.j_hz", "must be positive");
    if (!(c.omega_rf_over_j > 0.0)) err("leakage.omega_rf_over_j", "must be positive");
    if (c.steps == 0) err("leakage.steps", "must be at least 1");
    return v;
  }
  if (m == Mode::kPipulseDephasing) {
    if (c.inv_omega_t2.empty()) err("pipulse.inv_omega_t2", "sweep grid is empty");
    for (double x : c.inv_omega_t2) {
      if (!(x > 0.0) || !std::isfinite(x)) err("pipulse.inv_omega_t2", "values must be positive");
    }
    if (!(c.omega_rf > 0.0)) err("pipulse.omega_rf_rad_s", "must be positive");
    if (c.states.empty()) err("pipulse.states", "no initial states");
    for (const auto& s : c.states) {
      if (s != "identity" && s != "x" && s != "y" && s != "z") err("pipulse.states", "unknown state '" + s + "'");
    }
    return v;
  }

  // Noise-driven modes.
  if (!c.noise_strength) {
    err("noise.strength", "missing");
  } else if (!(*c.noise_strength >= 0.0)) {
    err("noise.strength", "must be non-negative");
  }
  if (c.tau_c_grid.empty()) err("noise.tau_c_s", "missing or empty sweep grid");
  for (double t : c.tau_c_grid) {
    if (!(t > 0.0)) err("noise.tau_c_s", "correlation times must be positive");
  }
  if (c.cycles.empty()) err("sequence.cycles", "missing or empty");
  for (std::size_t n : c.cycles) {
    if (n == 0) err("sequence.cycles", "cycle counts must be positive");
  }
  if (!(c.total_time > 0.0)) err("sequence.total_time_s", "must be positive");
  if (!(c.hard_pi_time > 0.0)) err("sequence.hard_pi_time_s", "must be positive");
  if (c.dt < 0.0) err("montecarlo.dt_s", "must be non-negative");

  try {
    const SpinSystem sys = c.system.build();
    (void)sys;
  } catch (const std::exception& e) {
    err("system", e.what());
  }
  const std::size_t n_spins = c.system.offsets_hz.empty() ? 2 : c.system.offsets_hz.size();

  if (m == Mode::kSmpCompare) {
    if (c.realizations.empty()) err("smp_compare.realizations", "empty");
    for (const auto& r : c.realizations) {
      if (r != "ideal" && r != "hard-pi" && r != "smp") err("smp_compare.realizations", "unknown realization '" + r + "'");
    }
    if (c.n_traj < 1) err("montecarlo.n_traj", "must be at least 1");
  } else {
    if (c.sequences.empty()) err("sequence.templates", "missing or empty");
    for (const auto& s : c.sequences) {
      if (s != "cp" && s != "ts" && s != "hard-pi" && s != "smp-file") {
        err("sequence.templates", "unknown template '" + s + "'");
      }
      if (m == Mode::kMcVsAnalytic && s != "cp" && s != "ts") {
        err("sequence.templates", "mc-vs-analytic compares ideal-pulse cp/ts only");
      }
    }
    if (m == Mode::kMcVsAnalytic && c.n_traj < 2) err("montecarlo.n_traj", "needs at least 2 trajectories");
    if (m == Mode::kMcVsAnalytic && n_spins != 2) err("system", "closed forms are for two spins");
  }
  if (needs_smp(c) && c.smp_file.empty()) err("sequence.smp_file", "required by the smp realization");
  for (const auto& s : c.sequences) {
    if (s == "ts" && n_spins < 2) err("sequence.templates", "ts needs two spins");
  }

  // Step bound: the default is min(tau/50, tau_c/20) for the shortest spacing.
  if (c.dt > 0.0 && !c.cycles.empty() && !c.tau_c_grid.empty() && c.total_time > 0.0) {
    std::size_t n_max = 0;
    for (std::size_t n : c.cycles) n_max = std::max(n_max, n);
    const bool has_ts = std::find(c.sequences.begin(), c.sequences.end(), "ts") != c.sequences.end();
    const double tau_min = c.total_time / ((has_ts ? 4.0 : 2.0) * static_cast<double>(std::max<std::size_t>(n_max, 1)));
    if (c.dt > tau_min / 50.0) warn("montecarlo.dt_s", "exceeds tau/50 for the shortest pulse spacing");
    for (double t : c.tau_c_grid) {
      if (c.dt > t / 20.0) {
        warn("montecarlo.dt_s", "exceeds tau_c/20 for tau_c = " + fmt(t));
        break;
      }
    }
  }
  return v;
}

RunSummary run_experiment(const ExperimentConfig& cfg, const RunOptions& opts) {
  const auto violations = validate(cfg);
  if (has_errors(violations)) {
    std::string msg = "invalid configuration";
    for (const auto& v : violations) msg += "\n  " + to_string(v);
    throw std::invalid_argument(msg);
  }
  Context ctx{cfg, opts, std::filesystem::path(cfg.output_dir), {}, nlohmann::json::object(), 0};
  std::filesystem::create_directories(ctx.dir);
  switch (*cfg.mode) {
    case Mode::kLeakageSweep: run_leakage(ctx); break;
    case Mode::kPipulseDephasing: run_pipulse(ctx); break;
    case Mode::kDdFidelity: run_dd(ctx, false); break;
    case Mode::kMcVsAnalytic: run_dd(ctx, true); break;
    case Mode::kSmpCompare: run_smp_compare(ctx); break;
  }
  nlohmann::json j;
  j["mode"] = mode_name(*cfg.mode);
  j["seed"] = cfg.seed;
  j["rows"] = ctx.summary.rows;
  j["files"] = ctx.summary.files;
  j["interrupted"] = ctx.summary.interrupted;
  j["omega_unit"] = cfg.omega_unit;
  std::vector<std::string> warnings;
  for (const auto& v : violations) warnings.push_back(to_string(v));
  j["warnings"] = warnings;
  for (auto it = ctx.extra.begin(); it != ctx.extra.end(); ++it) j[it.key()] = it.value();
  ctx.summary.json = j.dump(2);
  std::ofstream(ctx.dir / "summary.json") << ctx.summary.json << '\n';
  return ctx.summary;
}

}  // namespace dfsim
