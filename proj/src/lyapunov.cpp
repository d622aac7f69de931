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

#include "teleop/lyapunov.hpp"

namespace teleop {

LyapunovTerms lyapunov_instant(const LyapunovSide& m, const LyapunovSide& s,
                               const StabilityConstants& c) {
  auto side_energy = [](const LyapunovSide& x) {
    return 0.5 * x.eta.dot(x.M * x.eta) +
           0.5 * x.theta_tilde.dot(x.gamma_inv * x.theta_tilde);
  };
  LyapunovTerms v;
  v.v1 = 2.0 / (c.k_m * c.lam_m) * side_energy(m) + 2.0 / (c.k_s * c.lam_s) * side_energy(s);
  v.v2 = (m.q - s.q).squaredNorm();
  return v;
}

LyapunovMonitor::LyapunovMonitor(double dt, double span, const Vec2& qd_m0,
                                 const Vec2& qd_s0)
    : dt_(dt),
      m_{SignalHistory(dt, span, Vec2::Zero()), qd_m0.squaredNorm()},
      s_{SignalHistory(dt, span, Vec2::Zero()), qd_s0.squaredNorm()} {}

void LyapunovMonitor::push(double t, const Vec2& qd_m, const Vec2& qd_s) {
  auto advance = [&](Side& side, const Vec2& qd) {
    const double sq = qd.squaredNorm();
    Vec2 next = Vec2::Zero();
    if (count_ > 0) {
      next(0) = side.last(0) + 0.5 * dt_ * (side.last_sq + sq);
      next(1) = side.last(1) + 0.5 * dt_ * (side.last(0) + next(0));
    }
    side.cumulative.push(t, next);
    side.last = next;
    side.last_sq = sq;
  };
  advance(m_, qd_m);
  advance(s_, qd_s);
  ++count_;
}

Vec2 LyapunovMonitor::cumulative_at(const Side& side, double time) const {
  if (time < 0.0) return {side.qd0_sq * time, 0.5 * side.qd0_sq * time * time};
  return side.cumulative.sample(time);
}

LyapunovTerms LyapunovMonitor::evaluate(double t, const LyapunovSide& m,
                                        const LyapunovSide& s, double delay_m,
                                        double delay_s, const StabilityConstants& c,
                                        const LmiWitness& w) const {
  LyapunovTerms v = lyapunov_instant(m, s, c);
  const Vec2 now_m = cumulative_at(m_, t);
  const Vec2 now_s = cumulative_at(s_, t);
  const Vec2 back_m = cumulative_at(m_, t - c.h_m);
  const Vec2 back_s = cumulative_at(s_, t - c.h_s);
  v.v3 = w.r_m * (c.h_m * now_m(0) - (now_m(1) - back_m(1))) +
         w.r_s * (c.h_s * now_s(0) - (now_s(1) - back_s(1)));
  v.v4 = c.nu_m * (now_m(0) - cumulative_at(m_, t - delay_m)(0)) +
         c.nu_s * (now_s(0) - cumulative_at(s_, t - delay_s)(0));
  return v;
}

}  // namespace teleop
