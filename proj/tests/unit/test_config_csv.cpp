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
#include "teleop/csv.hpp"

#include "test_util.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <limits>
#include <sstream>
#include <string>

namespace teleop {
namespace {

const std::filesystem::path kConfigDir = std::filesystem::path(TELEOP_SOURCE_DIR) / "configs";

TEST(ParseConfig, EmptyTextGivesDefaults) {
  EXPECT_EQ(parse_config(""), reference_scenario());
  EXPECT_EQ(parse_config("# only a comment\n"), reference_scenario());
}

TEST(ParseConfig, ShippedScenarioA) {
  const ScenarioConfig cfg = load_config(kConfigDir / "scenario_a.yaml");
  EXPECT_EQ(cfg, reference_scenario());
  EXPECT_EQ(cfg.master.gains.K, 100.0 * Mat2::Identity());
  EXPECT_EQ(cfg.slave.gains.K, 100.0 * Mat2::Identity());
  EXPECT_EQ(cfg.master.gains.lambda, 0.5);
  EXPECT_EQ(cfg.master.delay.base, 0.3);
  EXPECT_EQ(cfg.slave.delay.sinusoids.size(), 2u);
}

TEST(ParseConfig, ShippedScenarioB) {
  EXPECT_EQ(load_config(kConfigDir / "scenario_b.yaml"), reference_scenario(ScenarioKind::kWall));
}

TEST(ParseConfig, PartialOverride) {
  const ScenarioConfig cfg = parse_config(
      "scenario: {kind: B, mode: classical, horizon: 3}\n"
      "gains: {K: [50, 60], Gamma: 2}\n"
      "slave:\n  gains: {lambda: 0.25}\n");
  EXPECT_EQ(cfg.scenario, ScenarioKind::kWall);
  EXPECT_EQ(cfg.mode, ControllerMode::kClassical);
  EXPECT_EQ(cfg.horizon, 3.0);
  EXPECT_EQ(cfg.master.gains.K, Vec2(50, 60).asDiagonal().toDenseMatrix());
  EXPECT_EQ(cfg.master.gains.Gamma, 2.0 * Mat5::Identity());
  EXPECT_EQ(cfg.master.gains.lambda, 0.5);
  EXPECT_EQ(cfg.slave.gains.lambda, 0.25);
  EXPECT_EQ(cfg.slave.gains.K, cfg.master.gains.K);
  EXPECT_EQ(cfg.wall, reference_scenario(ScenarioKind::kWall).wall);
}

TEST(ParseConfig, FullMatrixGain) {
  const ScenarioConfig cfg = parse_config("gains: {K: [[100, 5], [5, 80]]}\n");
  Mat2 k;
  k << 100, 5, 5, 80;
  EXPECT_EQ(cfg.master.gains.K, k);
}

TEST(ParseConfig, UnknownKeyReportsLine) {
  try {
    parse_config("scenario:\n  kind: A\n  horizn: 5\n", "bad.yaml");
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 3);
    EXPECT_EQ(e.field(), "scenario.horizn");
    EXPECT_NE(std::string(e.what()).find("bad.yaml"), std::string::npos);
  }
}

TEST(ParseConfig, WrongTypes) {
  EXPECT_THROW(parse_config("scenario: {dt: fast}\n"), ParseError);
  EXPECT_THROW(parse_config("scenario: {kind: C}\n"), ParseError);
  EXPECT_THROW(parse_config("master: {theta_hat0: [1, 2]}\n"), ParseError);
  EXPECT_THROW(parse_config("gains: {K: [1, 2, 3]}\n"), ParseError);
  EXPECT_THROW(parse_config("scenario: [1, 2]\n"), ParseError);
  EXPECT_THROW(parse_config("scenario: {dt: 1e-4\n"), ParseError);
}

TEST(ParseConfig, DelayRateViolation) {
  try {
    parse_config("delays:\n  master:\n    base: 0.5\n    sinusoids: [{amplitude: 0.2, omega: 6}]\n");
    FAIL() << "expected ValidationError";
  } catch (const ValidationError& e) {
    EXPECT_NE(std::string(e.what()).find("delay assumption"), std::string::npos) << e.what();
  }
}

TEST(ParseConfig, OtherInvariants) {
  EXPECT_THROW(parse_config("scenario: {dt: -1}\n"), ValidationError);
  EXPECT_THROW(parse_config("wall: {stiffness: -5}\n"), ValidationError);
  EXPECT_THROW(parse_config("gains: {kappa0: 0}\n"), ValidationError);
  EXPECT_THROW(parse_config("master: {arm: {l2: 0}}\n"), ValidationError);
}

TEST(LoadConfig, MissingFile) {
  EXPECT_THROW(load_config(kConfigDir / "does_not_exist.yaml"), ConfigError);
}

TEST(DumpConfig, RoundTrip) {
  ScenarioConfig cfg = reference_scenario(ScenarioKind::kWall);
  cfg.mode = ControllerMode::kClassical;
  cfg.prediction = PredictionSource::kMeasured;
  cfg.force_scale = 10.0;
  cfg.master.gains.K << 100.0, 1.0 / 3.0, 1.0 / 3.0, 90.0;
  cfg.slave.gains.Gamma = Eigen::Matrix<double, 5, 1>(1, 2, 3, 4, 0.1).asDiagonal();
  cfg.master.theta_hat0(2) = 0.1 + 0.2;
  cfg.slave.delay.sinusoids.push_back({0.01, 2.0});
  const std::string text = dump_config(cfg);
  EXPECT_EQ(parse_config(text), cfg);
  EXPECT_EQ(dump_config(parse_config(text)), text);
}

TEST(DumpConfig, RandomRoundTrip) {
  test::Sampler s(41);
  for (int i = 0; i < 50; ++i) {
    ScenarioConfig cfg = reference_scenario();
    cfg.dt = s.uniform(1e-5, 1e-3);
    cfg.horizon = s.uniform(0.0, 50.0);
    cfg.human = {s.uniform(-20.0, 20.0), 1.0, s.uniform(1.0, 20.0)};
    cfg.master.params = s.arm();
    cfg.slave.params = s.arm();
    cfg.master.theta_hat0 = s.theta(-3.0, 3.0);
    cfg.slave.gains.lambda = s.uniform(0.1, 3.0);
    EXPECT_EQ(parse_config(dump_config(cfg)), cfg) << "sample " << i;
  }
}

TrajectoryRecord random_record(test::Sampler& s, double t) {
  TrajectoryRecord r;
  r.t = t;
  r.q_m = s.vec2(-3, 3);
  r.q_s = s.vec2(-3, 3);
  r.qd_m = s.vec2(-1e-7, 1e-7);
  r.qd_s = s.vec2(-4, 4);
  r.theta_hat_m = s.theta(-2, 2);
  r.theta_hat_s = s.theta(-2, 2);
  r.tau_m = s.vec2(-1e3, 1e3);
  r.tau_s = s.vec2(-1e3, 1e3);
  r.f_h = s.vec2(-5, 5);
  r.f_e = Vec2(0.0, -0.0);
  r.delta_p = s.vec2(0, 1e6);
  r.delta_f = s.vec2(0, 1);
  r.lyapunov = s.uniform(0, 100);
  r.mu_m = 1e-300;
  r.mu_s = s.uniform(0, 1);
  r.lambda_min_p_m = s.uniform(0.1, 10);
  r.lambda_min_p_s = 12345.678901234;
  return r;
}

TEST(Csv, Header) {
  const auto& cols = trajectory_columns();
  ASSERT_EQ(cols.size(), 36u);
  EXPECT_EQ(cols.front(), "t");
  EXPECT_EQ(cols[1], "q_m1");
  EXPECT_EQ(cols.back(), "lambda_min_p_s");
  std::ostringstream os;
  write_trajectory(os, {});
  std::string expected;
  for (std::size_t i = 0; i < cols.size(); ++i) expected += (i ? "," : "") + cols[i];
  EXPECT_EQ(os.str(), expected + "\n");
}

TEST(Csv, FormatValue) {
  EXPECT_EQ(format_value(0.0), "0");
  EXPECT_EQ(format_value(0.1), "0.1");
  EXPECT_EQ(format_value(12345.678901234), "12345.6789");
  EXPECT_EQ(format_value(-2.5e-7), "-2.5e-07");
}

TEST(Csv, RoundTripIsExactAtNineDigits) {
  test::Sampler s(42);
  std::vector<TrajectoryRecord> recs;
  for (int i = 0; i < 200; ++i) recs.push_back(random_record(s, 1e-4 * i));
  std::stringstream ss;
  write_trajectory(ss, recs);
  const std::string first = ss.str();
  EXPECT_EQ(first.find('\r'), std::string::npos);
  const auto back = read_trajectory(ss);
  ASSERT_EQ(back.size(), recs.size());
  for (std::size_t i = 0; i < recs.size(); ++i) {
    const auto a = flatten(recs[i]);
    const auto b = flatten(back[i]);
    ASSERT_EQ(a.size(), b.size());
    for (std::size_t j = 0; j < a.size(); ++j) {
      EXPECT_EQ(b[j], std::strtod(format_value(a[j]).c_str(), nullptr)) << i << "," << j;
      EXPECT_NEAR(b[j], a[j], 5e-9 * std::abs(a[j]));
    }
  }
  // Parsing what was written and writing again is the identity.
  std::ostringstream again;
  write_trajectory(again, back);
  EXPECT_EQ(again.str(), first);
}

TEST(Csv, FlattenUnflatten) {
  test::Sampler s(43);
  const TrajectoryRecord r = random_record(s, 0.5);
  const auto v = flatten(r);
  ASSERT_EQ(v.size(), trajectory_columns().size());
  EXPECT_EQ(flatten(unflatten(v)), v);
  EXPECT_THROW(unflatten(std::vector<double>(3)), std::exception);
}

TEST(Csv, RejectsMalformedInput) {
  std::stringstream bad_header("t,q_m1\n0,0\n");
  EXPECT_THROW(read_trajectory(bad_header), CsvError);

  std::ostringstream os;
  write_trajectory(os, {TrajectoryRecord{}});
  const std::string good = os.str();
  const std::string header = good.substr(0, good.find('\n') + 1);

  std::stringstream short_row(header + "0,1,2\n");
  EXPECT_THROW(read_trajectory(short_row), CsvError);

  std::string cell = good;
  cell.replace(cell.rfind(",0"), 2, ",x");
  std::stringstream bad_cell(cell);
  EXPECT_THROW(read_trajectory(bad_cell), CsvError);

  std::string crlf = good;
  for (std::size_t p = crlf.find('\n'); p != std::string::npos; p = crlf.find('\n', p + 2)) {
    crlf.insert(p, "\r");
  }
  std::stringstream windows(crlf);
  EXPECT_EQ(read_trajectory(windows).size(), 1u);
}

}  // namespace
}  // namespace teleop
