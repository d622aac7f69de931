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

#include "teleop/metrics.hpp"

#include <cmath>
#include <stdexcept>

namespace teleop {
namespace {

Vec2 relative_error(const Vec2& value, const Vec2& reference, double eps) {
  Vec2 out;
  for (int i = 0; i < 2; ++i) {
    const double den = std::abs(reference(i));
    out(i) = den > eps ? std::abs(reference(i) - value(i)) / den : 0.0;
  }
  return out;
}

}  // namespace

Vec2 delta_p(const Vec2& q_m_delayed, const Vec2& q_s, double eps) {
  return relative_error(q_s, q_m_delayed, eps);
}

Vec2 delta_f(const Vec2& f_m, const Vec2& f_s_delayed, double eps) {
  return relative_error(f_m, f_s_delayed, eps);
}

void MetricAccumulator::accumulate(const Vec2& dp, const Vec2& df, double t) {
  const Vec2 adp = dp.cwiseAbs();
  const Vec2 adf = df.cwiseAbs();
  if (samples_ == 0) {
    first_t_ = t;
  } else {
    if (t < last_t_) throw std::invalid_argument("metric samples must be time-ordered");
    const double h = t - last_t_;
    jp_ += 0.5 * h * (last_dp_ + adp);
    jf_ += 0.5 * h * (last_df_ + adf);
  }
  last_dp_ = adp;
  last_df_ = adf;
  last_t_ = t;
  ++samples_;
}

}  // namespace teleop
