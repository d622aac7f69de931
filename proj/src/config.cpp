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

#include "teleop/config.hpp"

#include <yaml-cpp/yaml.h>

#include <fstream>
#include <initializer_list>
#include <sstream>

namespace teleop {
namespace {

std::string describe(const std::string& source, int line, const std::string& field,
                     const std::string& message) {
  std::ostringstream os;
  os << source;
  if (line > 0) os << ':' << line;
  if (!field.empty()) os << ": " << field;
  os << ": " << message;
  return os.str();
}

class Reader {
 public:
  explicit Reader(std::string source) : source_(std::move(source)) {}

  [[noreturn]] void fail(const YAML::Node& n, const std::string& field,
                         const std::string& msg) const {
    const int line = n.IsDefined() && n.Mark().line >= 0 ? n.Mark().line + 1 : 0;
    throw ParseError(source_, line, field, msg);
  }

  void expect_map(const YAML::Node& n, const std::string& field,
                  std::initializer_list<const char*> allowed) const {
    if (!n.IsMap()) fail(n, field, "expected a mapping");
    for (const auto& kv : n) {
      const auto key = kv.first.as<std::string>();
      bool known = false;
      for (const char* a : allowed) known = known || key == a;
      if (!known) fail(kv.first, join(field, key), "unknown key");
    }
  }

  double number(const YAML::Node& n, const std::string& field) const {
    if (!n.IsScalar()) fail(n, field, "expected a number");
    try {
      return n.as<double>();
    } catch (const YAML::BadConversion&) {
      fail(n, field, "expected a number, got '" + n.Scalar() + "'");
    }
  }

  int integer(const YAML::Node& n, const std::string& field) const {
    if (!n.IsScalar()) fail(n, field, "expected an integer");
    try {
      return n.as<int>();
    } catch (const YAML::BadConversion&) {
      fail(n, field, "expected an integer, got '" + n.Scalar() + "'");
    }
  }

  std::string text(const YAML::Node& n, const std::string& field) const {
    if (!n.IsScalar()) fail(n, field, "expected a string");
    return n.Scalar();
  }

  void read(const YAML::Node& map, const char* key, const std::string& field,
            double& out) const {
    if (const YAML::Node n = map[key]) out = number(n, join(field, key));
  }

  template <int N>
  Eigen::Matrix<double, N, N> matrix(const YAML::Node& n, const std::string& field) const {
    using Mat = Eigen::Matrix<double, N, N>;
    if (n.IsScalar()) return number(n, field) * Mat::Identity();
    if (!n.IsSequence() || n.size() != N) {
      fail(n, field, "expected a scalar, " + std::to_string(N) + " diagonal entries or an " +
                         std::to_string(N) + "x" + std::to_string(N) + " nested list");
    }
    Mat m = Mat::Zero();
    if (n[0].IsScalar()) {
      for (int i = 0; i < N; ++i) m(i, i) = number(n[i], field);
      return m;
    }
    for (int i = 0; i < N; ++i) {
      const YAML::Node row = n[i];
      if (!row.IsSequence() || row.size() != N) fail(row, field, "ragged matrix row");
      for (int j = 0; j < N; ++j) m(i, j) = number(row[j], field);
    }
    return m;
  }

  static std::string join(const std::string& a, const std::string& b) {
    return a.empty() ? b : a + "." + b;
  }

 private:
  std::string source_;
};

void read_gains(const Reader& r, const YAML::Node& n, const std::string& field, GainConfig& g) {
  r.expect_map(n, field, {"K", "lambda", "Gamma", "delta", "alpha_gain", "kappa0", "mu0",
                          "alpha_filter", "p0"});
  if (const YAML::Node k = n["K"]) g.K = r.matrix<2>(k, field + ".K");
  if (const YAML::Node k = n["Gamma"]) g.Gamma = r.matrix<5>(k, field + ".Gamma");
  r.read(n, "lambda", field, g.lambda);
  r.read(n, "delta", field, g.delta);
  r.read(n, "alpha_gain", field, g.alpha_gain);
  r.read(n, "kappa0", field, g.kappa0);
  r.read(n, "mu0", field, g.mu0);
  r.read(n, "alpha_filter", field, g.alpha_filter);
  r.read(n, "p0", field, g.p0);
}

void read_delay(const Reader& r, const YAML::Node& n, const std::string& field,
                DelayProfile& d) {
  r.expect_map(n, field, {"base", "sinusoids"});
  r.read(n, "base", field, d.base);
  if (const YAML::Node list = n["sinusoids"]) {
    const std::string f = field + ".sinusoids";
    if (!list.IsSequence()) r.fail(list, f, "expected a list");
    d.sinusoids.clear();
    for (const auto& item : list) {
      r.expect_map(item, f, {"amplitude", "omega"});
      Sinusoid s;
      r.read(item, "amplitude", f, s.amplitude);
      r.read(item, "omega", f, s.omega);
      d.sinusoids.push_back(s);
    }
  }
}

void read_side(const Reader& r, const YAML::Node& n, const std::string& field, SideConfig& s) {
  r.expect_map(n, field, {"arm", "theta_hat0", "gains"});
  if (const YAML::Node arm = n["arm"]) {
    const std::string f = field + ".arm";
    r.expect_map(arm, f, {"m1", "m2", "l1", "l2", "g"});
    r.read(arm, "m1", f, s.params.m1);
    r.read(arm, "m2", f, s.params.m2);
    r.read(arm, "l1", f, s.params.l1);
    r.read(arm, "l2", f, s.params.l2);
    r.read(arm, "g", f, s.params.g);
  }
  if (const YAML::Node th = n["theta_hat0"]) {
    const std::string f = field + ".theta_hat0";
    if (!th.IsSequence() || th.size() != 5) r.fail(th, f, "expected a list of 5 numbers");
    for (int i = 0; i < 5; ++i) s.theta_hat0(i) = r.number(th[i], f);
  }
  if (const YAML::Node g = n["gains"]) read_gains(r, g, field + ".gains", s.gains);
}

ScenarioConfig build(const YAML::Node& root, const Reader& r) {
  if (!root.IsDefined() || root.IsNull()) return reference_scenario();
  r.expect_map(root, "", {"scenario", "human", "wall", "gains", "delays", "master", "slave"});

  const YAML::Node sc = root["scenario"];
  ScenarioKind kind = ScenarioKind::kFreeMotion;
  if (sc) {
    r.expect_map(sc, "scenario",
                 {"kind", "mode", "prediction", "dt", "horizon", "log_stride", "force_scale"});
    if (const YAML::Node k = sc["kind"]) {
      const std::string v = r.text(k, "scenario.kind");
      if (v == "A") {
        kind = ScenarioKind::kFreeMotion;
      } else if (v == "B") {
        kind = ScenarioKind::kWall;
      } else {
        r.fail(k, "scenario.kind", "expected A or B, got '" + v + "'");
      }
    }
  }
  ScenarioConfig cfg = reference_scenario(kind);
  if (sc) {
    if (const YAML::Node m = sc["mode"]) {
      const std::string v = r.text(m, "scenario.mode");
      if (v == "composite") {
        cfg.mode = ControllerMode::kComposite;
      } else if (v == "classical") {
        cfg.mode = ControllerMode::kClassical;
      } else {
        r.fail(m, "scenario.mode", "expected composite or classical, got '" + v + "'");
      }
    }
    if (const YAML::Node p = sc["prediction"]) {
      const std::string v = r.text(p, "scenario.prediction");
      if (v == "filtered") {
        cfg.prediction = PredictionSource::kFiltered;
      } else if (v == "measured") {
        cfg.prediction = PredictionSource::kMeasured;
      } else {
        r.fail(p, "scenario.prediction", "expected filtered or measured, got '" + v + "'");
      }
    }
    r.read(sc, "dt", "scenario", cfg.dt);
    r.read(sc, "horizon", "scenario", cfg.horizon);
    r.read(sc, "force_scale", "scenario", cfg.force_scale);
    if (const YAML::Node s = sc["log_stride"]) {
      cfg.log_stride = r.integer(s, "scenario.log_stride");
    }
  }
  if (const YAML::Node h = root["human"]) {
    r.expect_map(h, "human", {"amplitude", "start", "stop"});
    r.read(h, "amplitude", "human", cfg.human.amplitude);
    r.read(h, "start", "human", cfg.human.start);
    r.read(h, "stop", "human", cfg.human.stop);
  }
  if (const YAML::Node w = root["wall"]) {
    r.expect_map(w, "wall", {"position", "stiffness"});
    r.read(w, "position", "wall", cfg.wall.position);
    r.read(w, "stiffness", "wall", cfg.wall.stiffness);
  }
  if (const YAML::Node g = root["gains"]) {
    read_gains(r, g, "gains", cfg.master.gains);
    read_gains(r, g, "gains", cfg.slave.gains);
  }
  if (const YAML::Node d = root["delays"]) {
    r.expect_map(d, "delays", {"master", "slave"});
    if (const YAML::Node m = d["master"]) read_delay(r, m, "delays.master", cfg.master.delay);
    if (const YAML::Node s = d["slave"]) read_delay(r, s, "delays.slave", cfg.slave.delay);
  }
  if (const YAML::Node m = root["master"]) read_side(r, m, "master", cfg.master);
  if (const YAML::Node s = root["slave"]) read_side(r, s, "slave", cfg.slave);
  return cfg;
}

template <typename M>
void emit_matrix(YAML::Emitter& out, const M& m) {
  out << YAML::Flow << YAML::BeginSeq;
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    out << YAML::Flow << YAML::BeginSeq;
    for (Eigen::Index j = 0; j < m.cols(); ++j) out << m(i, j);
    out << YAML::EndSeq;
  }
  out << YAML::EndSeq;
}

void emit_gains(YAML::Emitter& out, const GainConfig& g) {
  out << YAML::BeginMap;
  out << YAML::Key << "K" << YAML::Value;
  emit_matrix(out, g.K);
  out << YAML::Key << "lambda" << YAML::Value << g.lambda;
  out << YAML::Key << "Gamma" << YAML::Value;
  emit_matrix(out, g.Gamma);
  out << YAML::Key << "delta" << YAML::Value << g.delta;
  out << YAML::Key << "alpha_gain" << YAML::Value << g.alpha_gain;
  out << YAML::Key << "kappa0" << YAML::Value << g.kappa0;
  out << YAML::Key << "mu0" << YAML::Value << g.mu0;
  out << YAML::Key << "alpha_filter" << YAML::Value << g.alpha_filter;
  out << YAML::Key << "p0" << YAML::Value << g.p0;
  out << YAML::EndMap;
}

void emit_delay(YAML::Emitter& out, const DelayProfile& d) {
  out << YAML::BeginMap;
  out << YAML::Key << "base" << YAML::Value << d.base;
  out << YAML::Key << "sinusoids" << YAML::Value << YAML::BeginSeq;
  for (const auto& s : d.sinusoids) {
    out << YAML::Flow << YAML::BeginMap;
    out << YAML::Key << "amplitude" << YAML::Value << s.amplitude;
    out << YAML::Key << "omega" << YAML::Value << s.omega;
    out << YAML::EndMap;
  }
  out << YAML::EndSeq << YAML::EndMap;
}

void emit_side(YAML::Emitter& out, const SideConfig& s) {
  out << YAML::BeginMap;
  out << YAML::Key << "arm" << YAML::Value << YAML::Flow << YAML::BeginMap;
  out << YAML::Key << "m1" << YAML::Value << s.params.m1;
  out << YAML::Key << "m2" << YAML::Value << s.params.m2;
  out << YAML::Key << "l1" << YAML::Value << s.params.l1;
  out << YAML::Key << "l2" << YAML::Value << s.params.l2;
  out << YAML::Key << "g" << YAML::Value << s.params.g;
  out << YAML::EndMap;
  out << YAML::Key << "theta_hat0" << YAML::Value << YAML::Flow << YAML::BeginSeq;
  for (int i = 0; i < 5; ++i) out << s.theta_hat0(i);
  out << YAML::EndSeq;
  out << YAML::Key << "gains" << YAML::Value;
  emit_gains(out, s.gains);
  out << YAML::EndMap;
}

}  // namespace

ParseError::ParseError(const std::string& source, int line, const std::string& field,
                       const std::string& message)
    : ConfigError(describe(source, line, field, message)), line_(line), field_(field) {}

ScenarioConfig parse_config(std::string_view text, const std::string& source) {
  const Reader reader(source);
  YAML::Node root;
  try {
    root = YAML::Load(std::string(text));
  } catch (const YAML::ParserException& e) {
    throw ParseError(source, e.mark.line >= 0 ? e.mark.line + 1 : 0, "", e.msg);
  }
  ScenarioConfig cfg = build(root, reader);
  try {
    validate(cfg);
  } catch (const AssumptionViolation& e) {
    throw ValidationError(source + ": " + e.what());
  } catch (const std::invalid_argument& e) {
    throw ValidationError(source + ": " + e.what());
  }
  return cfg;
}

ScenarioConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str(), path.string());
}

std::string dump_config(const ScenarioConfig& cfg) {
  YAML::Emitter out;
  out.SetDoublePrecision(17);
  out << YAML::BeginMap;
  out << YAML::Key << "scenario" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "kind" << YAML::Value << std::string(to_string(cfg.scenario));
  out << YAML::Key << "mode" << YAML::Value << std::string(to_string(cfg.mode));
  out << YAML::Key << "prediction" << YAML::Value << std::string(to_string(cfg.prediction));
  out << YAML::Key << "dt" << YAML::Value << cfg.dt;
  out << YAML::Key << "horizon" << YAML::Value << cfg.horizon;
  out << YAML::Key << "log_stride" << YAML::Value << cfg.log_stride;
  out << YAML::Key << "force_scale" << YAML::Value << cfg.force_scale;
  out << YAML::EndMap;

  out << YAML::Key << "human" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "amplitude" << YAML::Value << cfg.human.amplitude;
  out << YAML::Key << "start" << YAML::Value << cfg.human.start;
  out << YAML::Key << "stop" << YAML::Value << cfg.human.stop;
  out << YAML::EndMap;

  out << YAML::Key << "wall" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "position" << YAML::Value << cfg.wall.position;
  out << YAML::Key << "stiffness" << YAML::Value << cfg.wall.stiffness;
  out << YAML::EndMap;

  out << YAML::Key << "delays" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "master" << YAML::Value;
  emit_delay(out, cfg.master.delay);
  out << YAML::Key << "slave" << YAML::Value;
  emit_delay(out, cfg.slave.delay);
  out << YAML::EndMap;

  out << YAML::Key << "master" << YAML::Value;
  emit_side(out, cfg.master);
  out << YAML::Key << "slave" << YAML::Value;
  emit_side(out, cfg.slave);
  out << YAML::EndMap;
  return std::string(out.c_str()) + "\n";
}

}  // namespace teleop
