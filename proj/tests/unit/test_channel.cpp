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

#include "teleop/channel.hpp"

#include "test_util.hpp"

#include <gtest/gtest.h>

#include <cmath>

namespace teleop {
namespace {

const DelayProfile kMasterDelay{0.3, {{0.2, 2.0}, {0.1, 5.0}}};
const DelayProfile kSlaveDelay{0.8, {{0.3, 1.5}, {0.1, 5.0}}};

TEST(DelayValue, BaseAtTimeZero) {
  EXPECT_DOUBLE_EQ(delay_value(kMasterDelay, 0.0), 0.3);
  EXPECT_DOUBLE_EQ(delay_value(kSlaveDelay, 0.0), 0.8);
}

TEST(DelayValue, ZeroProfile) {
  const DelayProfile zero;
  for (double t : {0.0, 0.5, 17.0}) EXPECT_EQ(delay_value(zero, t), 0.0);
}

TEST(DelayValue, Formula) {
  const double t = 1.7;
  EXPECT_NEAR(delay_value(kMasterDelay, t), 0.3 + 0.2 * std::sin(2 * t) + 0.1 * std::sin(5 * t),
              1e-15);
  EXPECT_NEAR(delay_rate(kMasterDelay, t), 0.4 * std::cos(2 * t) + 0.5 * std::cos(5 * t), 1e-15);
}

TEST(ValidateProfile, MasterBounds) {
  const DelayBounds b = validate_profile(kMasterDelay);
  EXPECT_NEAR(b.h, 0.6, 1e-15);
  EXPECT_NEAR(b.d, 0.9, 1e-15);
}

TEST(ValidateProfile, SlaveBounds) {
  const DelayBounds b = validate_profile(kSlaveDelay);
  EXPECT_NEAR(b.h, 1.2, 1e-15);
  EXPECT_NEAR(b.d, 0.95, 1e-15);
}

TEST(ValidateProfile, NegativeDelayRejected) {
  EXPECT_THROW(validate_profile({0.1, {{0.2, 1.0}}}), AssumptionViolation);
}

TEST(ValidateProfile, FastDelayRejected) {
  try {
    validate_profile({0.5, {{0.25, 4.0}}});
    FAIL() << "expected AssumptionViolation";
  } catch (const AssumptionViolation& e) {
    EXPECT_NE(std::string(e.what()).find("delay assumption"), std::string::npos);
  }
}

TEST(Property, SampledDelayRateWithinBound) {
  test::Sampler rng(41);
  for (int k = 0; k < 20; ++k) {
    DelayProfile p;
    double budget = 0.99;
    for (int j = 0; j < 3; ++j) {
      const double w = rng.uniform(0.5, 8.0);
      const double a = rng.uniform(0.0, budget / 3.0) / w;
      p.sinusoids.push_back({a, w});
    }
    double amp = 0.0;
    for (const auto& s : p.sinusoids) amp += s.amplitude;
    p.base = amp + rng.uniform(0.0, 0.5);
    const DelayBounds b = validate_profile(p);
    const double h = 1e-6;
    for (int i = 0; i < 10000; ++i) {
      const double t = i * 1e-3;
      const double rate = (delay_value(p, t + h) - delay_value(p, t - h)) / (2 * h);
      ASSERT_LE(std::abs(rate), b.d + 1e-6);
      ASSERT_GE(delay_value(p, t), 0.0);
      ASSERT_LE(delay_value(p, t), b.h + 1e-12);
    }
  }
}

SignalHistory ramp_history(double dt, double until, double span) {
  SignalHistory h(dt, span, Vec2::Zero());
  const long n = std::lround(until / dt);
  for (long i = 0; i <= n; ++i) {
    const double s = i * dt;
    h.push(s, Vec2(s, s));
  }
  return h;
}

TEST(SampleDelayed, LinearSignalIsExact) {
  const SignalHistory h = ramp_history(0.01, 1.0, 2.0);
  const Vec2 v = sample_delayed(h, 1.0, 0.25);
  EXPECT_NEAR(v(0), 0.75, 1e-12);
  EXPECT_NEAR(v(1), 0.75, 1e-12);
}

TEST(SampleDelayed, ZeroDelayIsLatest) {
  const SignalHistory h = ramp_history(0.01, 1.0, 2.0);
  EXPECT_EQ(sample_delayed(h, h.latest_time(), 0.0), Vec2(1.0, 1.0));
}

TEST(SampleDelayed, BeforeStartIsInitial) {
  SignalHistory h(0.01, 1.0, Vec2(4.0, -2.0));
  h.push(0.0, Vec2(5.0, 5.0));
  h.push(0.01, Vec2(6.0, 6.0));
  EXPECT_EQ(sample_delayed(h, 0.01, 0.5), Vec2(4.0, -2.0));
}

TEST(SampleDelayed, FutureReadThrows) {
  const SignalHistory h = ramp_history(0.01, 1.0, 2.0);
  EXPECT_THROW(h.sample(1.0 + 0.5 * 0.01), FutureRead);
  EXPECT_NO_THROW(h.sample(1.0 + 1e-14));
}

TEST(SignalHistory, ForgetsBeyondSpan) {
  const SignalHistory h = ramp_history(0.01, 5.0, 1.0);
  EXPECT_NO_THROW(h.sample(4.0));
  EXPECT_THROW(h.sample(2.0), std::out_of_range);
  EXPECT_LE(h.earliest_time(), 4.0);
}

TEST(SignalHistory, RejectsIrregularPush) {
  SignalHistory h(0.01, 1.0, Vec2::Zero());
  h.push(0.0, Vec2::Zero());
  EXPECT_THROW(h.push(0.02, Vec2::Zero()), std::invalid_argument);
}

TEST(Property, InterpolationAccuracy) {
  // Linear interpolation error is at most dt^2 / 8 * max|f''|.
  const double dt = 1e-3;
  const double w = 3.0;
  SignalHistory h(dt, 3.0, Vec2::Zero());
  for (int i = 0; i <= 2000; ++i) {
    const double s = i * dt;
    h.push(s, Vec2(std::sin(w * s), std::cos(w * s)));
  }
  test::Sampler rng(42);
  const double bound = dt * dt / 8.0 * w * w + 1e-15;
  for (int i = 0; i < 10000; ++i) {
    const double s = rng.uniform(0.0, 2.0);
    const Vec2 v = h.sample(s);
    ASSERT_LE(std::abs(v(0) - std::sin(w * s)), bound);
    ASSERT_LE(std::abs(v(1) - std::cos(w * s)), bound);
  }
}

}  // namespace
}  // namespace teleop
