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

// Delayed communication link between the two arms.

#ifndef TELEOP_CHANNEL_HPP
#define TELEOP_CHANNEL_HPP

#include "teleop/dynamics.hpp"

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace teleop {

struct Sinusoid {
  double amplitude = 0.0;  // s
  double omega = 0.0;      // rad/s

  bool operator==(const Sinusoid&) const = default;
};

/// T(t) = base + sum_k a_k sin(w_k t).
struct DelayProfile {
  double base = 0.0;
  std::vector<Sinusoid> sinusoids;

  bool operator==(const DelayProfile&) const = default;
};

struct DelayBounds {
  double h = 0.0;  // sup T
  double d = 0.0;  // sup |dT/dt|
};

/// Raised when a delay profile falls outside 0 <= T <= h, |dT/dt| <= d < 1.
class AssumptionViolation : public std::runtime_error {
 public:
  explicit AssumptionViolation(const std::string& what) : std::runtime_error(what) {}
};

class FutureRead : public std::runtime_error {
 public:
  explicit FutureRead(const std::string& what) : std::runtime_error(what) {}
};

double delay_value(const DelayProfile& p, double t);

/// Analytic derivative of T(t).
double delay_rate(const DelayProfile& p, double t);

/// h = base + sum|a|, d = sum|a w|. Throws AssumptionViolation if the profile
/// can go negative or d >= 1.
DelayBounds validate_profile(const DelayProfile& p);

/// Fixed-step ring buffer of 2-vectors. Samples must be pushed at
/// t0, t0 + dt, t0 + 2 dt, ...; times before t0 read the initial value.
class SignalHistory {
 public:
  SignalHistory(double dt, double span, const Vec2& initial, double t0 = 0.0);

  void push(double t, const Vec2& value);

  /// Linear interpolation at `time`. Times before the first sample return the
  /// initial value; times past the latest sample throw FutureRead.
  Vec2 sample(double time) const;

  double latest_time() const;
  double earliest_time() const;
  std::size_t size() const { return count_ < ring_.size() ? count_ : ring_.size(); }
  std::size_t capacity() const { return ring_.size(); }
  const Vec2& initial() const { return initial_; }

 private:
  const Vec2& at(std::size_t index) const { return ring_[index % ring_.size()]; }

  double dt_;
  double t0_;
  Vec2 initial_;
  std::vector<Vec2> ring_;
  std::size_t count_ = 0;  // total samples pushed
};

/// q_j(t - T) style read.
Vec2 sample_delayed(const SignalHistory& hist, double t, double delay);

}  // namespace teleop

#endif  // TELEOP_CHANNEL_HPP
