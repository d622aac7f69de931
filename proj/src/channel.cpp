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

#include <cmath>
#include <sstream>

namespace teleop {

double delay_value(const DelayProfile& p, double t) {
  double value = p.base;
  for (const auto& s : p.sinusoids) value += s.amplitude * std::sin(s.omega * t);
  return value;
}

double delay_rate(const DelayProfile& p, double t) {
  double rate = 0.0;
  for (const auto& s : p.sinusoids) rate += s.amplitude * s.omega * std::cos(s.omega * t);
  return rate;
}

DelayBounds validate_profile(const DelayProfile& p) {
  if (!std::isfinite(p.base)) throw AssumptionViolation("delay base must be finite");
  double amp = 0.0;
  double rate = 0.0;
  for (const auto& s : p.sinusoids) {
    if (!std::isfinite(s.amplitude) || !std::isfinite(s.omega)) {
      throw AssumptionViolation("delay sinusoid terms must be finite");
    }
    amp += std::abs(s.amplitude);
    rate += std::abs(s.amplitude * s.omega);
  }
  // Relative slack absorbs round-off when the amplitudes sum exactly to base.
  if (p.base - amp < -1e-12 * (1.0 + amp)) {
    std::ostringstream os;
    os << "delay assumption violated: delay can become negative (base " << p.base
       << " < total amplitude " << amp << ")";
    throw AssumptionViolation(os.str());
  }
  if (rate >= 1.0) {
    std::ostringstream os;
    os << "delay assumption violated: delay-rate bound d = " << rate << " must be < 1";
    throw AssumptionViolation(os.str());
  }
  return {p.base + amp, rate};
}

SignalHistory::SignalHistory(double dt, double span, const Vec2& initial, double t0)
    : dt_(dt), t0_(t0), initial_(initial) {
  if (!(dt > 0.0) || !(span >= 0.0)) {
    throw std::invalid_argument("SignalHistory needs dt > 0 and span >= 0");
  }
  // Two extra samples so a read exactly span behind the head always brackets.
  const auto n = static_cast<std::size_t>(std::ceil(span / dt)) + 3;
  ring_.assign(n, initial);
}

void SignalHistory::push(double t, const Vec2& value) {
  const double expected = t0_ + static_cast<double>(count_) * dt_;
  if (std::abs(t - expected) > 1e-6 * dt_) {
    std::ostringstream os;
    os << "SignalHistory expects a sample at t=" << expected << ", got t=" << t;
    throw std::invalid_argument(os.str());
  }
  ring_[count_ % ring_.size()] = value;
  ++count_;
}

double SignalHistory::latest_time() const {
  if (count_ == 0) return t0_;
  return t0_ + static_cast<double>(count_ - 1) * dt_;
}

double SignalHistory::earliest_time() const {
  const std::size_t first = count_ > ring_.size() ? count_ - ring_.size() : 0;
  return t0_ + static_cast<double>(first) * dt_;
}

Vec2 SignalHistory::sample(double time) const {
  if (time < t0_ || count_ == 0) {
    if (count_ == 0 && time > t0_) throw FutureRead("read from an empty history");
    return initial_;
  }
  const double pos = (time - t0_) / dt_;
  const double last = static_cast<double>(count_ - 1);
  if (pos > last) {
    // Round-off from t - T arithmetic is tolerated.
    if (pos - last > 1e-9) {
      std::ostringstream os;
      os << "future read at t=" << time << " beyond latest sample " << latest_time();
      throw FutureRead(os.str());
    }
    return at(count_ - 1);
  }
  auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t first = count_ > ring_.size() ? count_ - ring_.size() : 0;
  if (lo < first) {
    std::ostringstream os;
    os << "read at t=" << time << " is older than the retained history";
    throw std::out_of_range(os.str());
  }
  if (lo + 1 >= count_) return at(lo);
  const double frac = pos - static_cast<double>(lo);
  if (frac == 0.0) return at(lo);
  return (1.0 - frac) * at(lo) + frac * at(lo + 1);
}

Vec2 sample_delayed(const SignalHistory& hist, double t, double delay) {
  return hist.sample(t - delay);
}

}  // namespace teleop
