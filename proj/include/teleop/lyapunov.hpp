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

// Lyapunov-Krasovskii functional V = V1 + V2 + V3 + V4 evaluated along a
// simulated trajectory:
//
//   V1 = sum_i 2 / (k_i lambda_i) * (1/2 eta_i^T M_i eta_i + 1/2 th_i^T Gamma_i^-1 th_i)
//   V2 = |q_m - q_s|^2
//   V3 = sum_i r_i * int_{-h_i}^0 int_{t+s}^t |qd_i(u)|^2 du ds
//   V4 = sum_i nu_i * int_{t-T_i(t)}^t |qd_i(u)|^2 du
//
// where th_i is the true-minus-estimated parameter error.

#ifndef TELEOP_LYAPUNOV_HPP
#define TELEOP_LYAPUNOV_HPP

#include "teleop/channel.hpp"
#include "teleop/dynamics.hpp"
#include "teleop/stability.hpp"

namespace teleop {

struct LyapunovSide {
  Vec2 q = Vec2::Zero();
  Vec2 eta = Vec2::Zero();
  Mat2 M = Mat2::Identity();
  ThetaVec theta_tilde = ThetaVec::Zero();
  Mat5 gamma_inv = Mat5::Identity();
};

struct LyapunovTerms {
  double v1 = 0.0;
  double v2 = 0.0;
  double v3 = 0.0;
  double v4 = 0.0;

  double total() const { return v1 + v2 + v3 + v4; }
};

/// V1 and V2 only; the integral terms are left at zero.
LyapunovTerms lyapunov_instant(const LyapunovSide& m, const LyapunovSide& s,
                               const StabilityConstants& c);

/// Keeps trapezoidal running integrals C(t) = int_0^t |qd|^2 and
/// D(t) = int_0^t C so the window integrals cost O(1) per evaluation:
///   int_{t-h}^t (u - t + h) |qd(u)|^2 du = h C(t) - (D(t) - D(t - h)).
/// Before t = 0 the velocity is held at its initial value.
class LyapunovMonitor {
 public:
  LyapunovMonitor(double dt, double span, const Vec2& qd_m0, const Vec2& qd_s0);

  /// Appends the velocities at the next step time (t = 0, dt, 2 dt, ...).
  void push(double t, const Vec2& qd_m, const Vec2& qd_s);

  LyapunovTerms evaluate(double t, const LyapunovSide& m, const LyapunovSide& s,
                         double delay_m, double delay_s, const StabilityConstants& c,
                         const LmiWitness& w) const;

 private:
  struct Side {
    SignalHistory cumulative;  // (C, D)
    double qd0_sq;
    double last_sq = 0.0;
    Vec2 last = Vec2::Zero();
  };
  Vec2 cumulative_at(const Side& side, double time) const;

  double dt_;
  long count_ = 0;
  Side m_;
  Side s_;
};

}  // namespace teleop

#endif  // TELEOP_LYAPUNOV_HPP
