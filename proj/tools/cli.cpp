// Copyright 2026 The Teleop Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "cli.hpp"

#include "teleop/config.hpp"
#include "teleop/csv.hpp"
#include "teleop/sim.hpp"
#include "teleop/stability.hpp"

#include <CLI11.hpp>
#include <boost/crc.hpp>
#include <yaml-cpp/yaml.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <iterator>
#include <optional>
#include <sstream>
#include <string>

namespace teleop::cli {
namespace {

namespace fs = std::filesystem;

struct SimulateArgs {
  std::string config;
  std::string out;
  std::optional<std::string> mode;
  std::optional<std::string> scenario;
  std::optional<double> force_scale;
  std::optional<double> dt;
  std::optional<double> horizon;
  std::optional<int> log_stride;
  bool require_stable = false;
};

struct StabilityArgs {
  std::string config;
  std::string mode = "theorem";
  double r_m = 1.0;
  double r_s = 1.0;
};

std::string fmt(double v, int digits = 6) {
  std::ostringstream os;
  os << std::setprecision(digits) << v;
  return os.str();
}

std::string crc32_hex(const std::string& bytes) {
  boost::crc_32_type crc;
  crc.process_bytes(bytes.data(), bytes.size());
  char buf[16];
  std::snprintf(buf, sizeof buf, "%08x", crc.checksum());
  return buf;
}

ScenarioConfig apply_overrides(ScenarioConfig cfg, const SimulateArgs& a) {
  if (a.mode) cfg.mode = *a.mode == "classical" ? ControllerMode::kClassical : ControllerMode::kComposite;
  if (a.scenario) cfg.scenario = *a.scenario == "B" ? ScenarioKind::kWall : ScenarioKind::kFreeMotion;
  if (a.force_scale) cfg.force_scale = *a.force_scale;
  if (a.dt) cfg.dt = *a.dt;
  if (a.horizon) cfg.horizon = *a.horizon;
  if (a.log_stride) cfg.log_stride = *a.log_stride;
  try {
    validate(cfg);
  } catch (const std::exception& e) {
    throw ValidationError(std::string("command-line override: ") + e.what());
  }
  return cfg;
}

void write_manifest(const fs::path& path, const SimulateArgs& a, const ScenarioConfig& cfg,
                    const TrajectoryLog& log, const std::string& csv_bytes) {
  YAML::Emitter m;
  m.SetDoublePrecision(17);
  m << YAML::BeginMap;
  m << YAML::Key << "config_path" << YAML::Value << a.config;
  m << YAML::Key << "output_dir" << YAML::Value << a.out;
  m << YAML::Key << "config" << YAML::Value << YAML::Load(dump_config(cfg));
  m << YAML::Key << "artifacts" << YAML::Value << YAML::BeginMap;
  m << YAML::Key << "trajectory.csv" << YAML::Value << YAML::BeginMap;
  m << YAML::Key << "crc32" << YAML::Value << crc32_hex(csv_bytes);
  m << YAML::Key << "bytes" << YAML::Value << csv_bytes.size();
  m << YAML::Key << "rows" << YAML::Value << log.records.size();
  m << YAML::EndMap << YAML::EndMap;
  m << YAML::Key << "witness" << YAML::Value << YAML::Flow << YAML::BeginMap;
  m << YAML::Key << "feasible" << YAML::Value << log.witness_feasible;
  m << YAML::Key << "r_m" << YAML::Value << log.witness.r_m;
  m << YAML::Key << "r_s" << YAML::Value << log.witness.r_s;
  m << YAML::Key << "margin" << YAML::Value << log.witness.margin;
  m << YAML::EndMap;
  m << YAML::EndMap;
  std::ofstream out(path, std::ios::binary);
  out << m.c_str() << '\n';
  if (!out) throw std::runtime_error("cannot write " + path.string());
}

int simulate(const SimulateArgs& a, std::ostream& out) {
  const ScenarioConfig cfg = apply_overrides(load_config(a.config), a);
  Simulator probe(cfg);
  if (a.require_stable && !probe.witness_feasible()) {
    out << "stability conditions infeasible for this configuration\n";
    return kInfeasible;
  }
  const TrajectoryLog log = run_scenario(cfg);

  const fs::path dir(a.out);
  fs::create_directories(dir);
  std::ostringstream csv;
  write_trajectory(csv, log.records);
  const std::string bytes = csv.str();
  {
    std::ofstream f(dir / "trajectory.csv", std::ios::binary);
    f << bytes;
    if (!f) throw std::runtime_error("cannot write " + (dir / "trajectory.csv").string());
  }
  write_manifest(dir / "manifest.yaml", a, cfg, log, bytes);

  const auto& last = log.records.back();
  out << "scenario " << to_string(cfg.scenario) << ", " << to_string(cfg.mode) << ", "
      << log.records.size() << " rows to " << (dir / "trajectory.csv").string() << '\n';
  out << "final q_m = (" << fmt(last.q_m(0)) << ", " << fmt(last.q_m(1)) << "), q_s = ("
      << fmt(last.q_s(0)) << ", " << fmt(last.q_s(1)) << ")\n";
  out << "Delta_Jp = (" << fmt(log.metrics.jp()(0)) << ", " << fmt(log.metrics.jp()(1))
      << "), Delta_Jf = (" << fmt(log.metrics.jf()(0)) << ", " << fmt(log.metrics.jf()(1))
      << ")\n";
  return kOk;
}

int stability(const StabilityArgs& a, std::ostream& out) {
  const ScenarioConfig cfg = load_config(a.config);
  const LmiMode mode = a.mode == "proposition" ? LmiMode::kProposition : LmiMode::kTheorem;
  const StabilityConstants c =
      stability_constants(cfg.master.params, cfg.slave.params, cfg.master.gains,
                          cfg.slave.gains, cfg.master.delay, cfg.slave.delay);
  auto row = [&out](const std::string& name, double m, double s) {
    out << std::left << std::setw(18) << name << std::right << std::setw(14) << fmt(m)
        << std::setw(14) << fmt(s) << '\n';
  };
  out << std::left << std::setw(18) << "constant" << std::right << std::setw(14) << "master"
      << std::setw(14) << "slave" << '\n';
  row("rho_max", c.rho_m_M, c.rho_s_M);
  row("h", c.h_m, c.h_s);
  row("d", c.d_m, c.d_s);
  row("k", c.k_m, c.k_s);
  row("lambda", c.lam_m, c.lam_s);
  row("nu", c.nu_m, c.nu_s);
  row("c (Coriolis)", c.c_m, c.c_s);
  out << '\n' << "mode " << to_string(mode) << '\n';

  const double cand = lmi_margin(c, a.r_m, a.r_s, mode);
  const bool cand_ok = cand < 0.0 && schur_conditions_hold(c, a.r_m, a.r_s, mode);
  out << "candidate r_m=" << fmt(a.r_m) << " r_s=" << fmt(a.r_s) << ": max eigenvalue "
      << fmt(cand) << (cand_ok ? " (accepted)" : " (rejected)") << '\n';

  const auto w = lmi_feasible(c, mode);
  if (!w && !cand_ok) {
    out << "status Infeasible\n";
    return kInfeasible;
  }
  if (w) {
    out << "witness r_m=" << fmt(w->r_m) << " r_s=" << fmt(w->r_s) << " margin "
        << fmt(w->margin) << '\n';
  }
  out << "status feasible\n";
  return kOk;
}

int metrics_report(const std::string& path, std::ostream& out) {
  const auto records = read_trajectory(fs::path(path));
  MetricAccumulator acc;
  for (const auto& r : records) acc.accumulate(r.delta_p, r.delta_f, r.t);
  out << std::left << std::setw(12) << "index" << std::right << std::setw(16) << "joint 1"
      << std::setw(16) << "joint 2" << '\n';
  out << std::left << std::setw(12) << "Delta_Jp" << std::right << std::setw(16)
      << fmt(acc.jp()(0)) << std::setw(16) << fmt(acc.jp()(1)) << '\n';
  out << std::left << std::setw(12) << "Delta_Jf" << std::right << std::setw(16)
      << fmt(acc.jf()(0)) << std::setw(16) << fmt(acc.jf()(1)) << '\n';
  out << "horizon " << fmt(acc.horizon()) << " s over " << records.size() << " rows\n";
  return kOk;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Delayed bilateral teleoperation with composite adaptive control", "teleop"};
  app.require_subcommand(1);

  SimulateArgs sim;
  auto* cmd_sim = app.add_subcommand("simulate", "run a scenario and write trajectory.csv");
  cmd_sim->add_option("--config", sim.config, "scenario YAML")->required()->check(CLI::ExistingFile);
  cmd_sim->add_option("--out", sim.out, "output directory")->required();
  cmd_sim->add_option("--mode", sim.mode)->check(CLI::IsMember({"composite", "classical"}));
  cmd_sim->add_option("--scenario", sim.scenario)->check(CLI::IsMember({"A", "B"}));
  cmd_sim->add_option("--force-scale", sim.force_scale);
  cmd_sim->add_option("--dt", sim.dt);
  cmd_sim->add_option("--horizon", sim.horizon);
  cmd_sim->add_option("--log-stride", sim.log_stride);
  cmd_sim->add_flag("--require-stable", sim.require_stable,
                    "exit 4 if the stability conditions are infeasible");

  StabilityArgs stab;
  auto* cmd_stab = app.add_subcommand("stability", "print stability constants and witness");
  cmd_stab->add_option("--config", stab.config)->required()->check(CLI::ExistingFile);
  cmd_stab->add_option("--mode", stab.mode)->check(CLI::IsMember({"theorem", "proposition"}));
  cmd_stab->add_option("--rm", stab.r_m, "candidate R_m = r I")->check(CLI::PositiveNumber);
  cmd_stab->add_option("--rs", stab.r_s, "candidate R_s = r I")->check(CLI::PositiveNumber);

  std::string trajectory;
  auto* cmd_met = app.add_subcommand("metrics-report", "integral indices from a trajectory");
  cmd_met->add_option("--trajectory", trajectory)->required()->check(CLI::ExistingFile);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kConfigError;
  }

  try {
    if (*cmd_sim) return simulate(sim, out);
    if (*cmd_stab) return stability(stab, out);
    return metrics_report(trajectory, out);
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const NumericalDivergence& e) {
    err << "divergence: " << e.what() << '\n';
    return kDivergence;
  } catch (const InvariantBreach& e) {
    err << "divergence: " << e.what() << '\n';
    return kDivergence;
  } catch (const SingularInertia& e) {
    err << "divergence: " << e.what() << '\n';
    return kDivergence;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kFailure;
  }
}

}  // namespace teleop::cli
