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

// Relative tracking measures under delay and their time integrals.

#ifndef TELEOP_METRICS_HPP
#define TELEOP_METRICS_HPP

#include "teleop/dynamics.hpp"

namespace teleop {

inline constexpr double kMetricEps = 1e-6;

/// Per joint |q_m(t - T_m) - q_s| / |q_m(t - T_m)|, or 0 when the reference
/// magnitude is not above eps.
Vec2 delta_p(const Vec2& q_m_delayed, const Vec2& q_s, double eps = kMetricEps);

/// Per joint |F_m - F_s(t - T_s)| / |F_s(t - T_s)|, or 0 when the delayed
/// slave force is not above eps.
Vec2 delta_f(const Vec2& f_m, const Vec2& f_s_delayed, double eps = kMetricEps);

/// Trapezoidal running integrals of |delta_p| and |delta_f| per joint.
class MetricAccumulator {
 public:
  /// The first sample only sets the starting point. Throws if t goes backwards.
  void accumulate(const Vec2& dp, const Vec2& df, double t);

  const Vec2& jp() const { return jp_; }
  const Vec2& jf() const { return jf_; }
  long samples() const { return samples_; }
  double last_time() const { return last_t_; }
  double horizon() const { return samples_ > 0 ? last_t_ - first_t_ : 0.0; }

 private:
  Vec2 jp_ = Vec2::Zero();
  Vec2 jf_ = Vec2::Zero();
  Vec2 last_dp_ = Vec2::Zero();
  Vec2 last_df_ = Vec2::Zero();
  double first_t_ = 0.0;
  double last_t_ = 0.0;
  long samples_ = 0;
};

}  // namespace teleop

#endif  // TELEOP_METRICS_HPP
