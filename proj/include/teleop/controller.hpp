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

// Delayed-coupling tracking controller with two adaptation laws:
//
//  * composite: the estimate is driven by the tracking term Y^T eta and by an
//    auxiliary variable z that tracks P * theta_tilde, where P is an
//    information-like matrix with bounded-gain forgetting (P >= kappa0 * I).
//  * classical: theta_hat_dot = Gamma Y^T eta, kept as the comparison baseline.

#ifndef TELEOP_CONTROLLER_HPP
#define TELEOP_CONTROLLER_HPP

#include "teleop/dynamics.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace teleop {

struct GainConfig {
  Mat2 K = 100.0 * Mat2::Identity();
  double lambda = 0.5;
  Mat5 Gamma = Mat5::Identity();
  double delta = 1.0;
  double alpha_gain = 1.0;    // scales xi = alpha * |Y^T eta| / kappa0
  double kappa0 = 0.1;        // floor of P
  double mu0 = 1.0;           // maximum forgetting rate
  double alpha_filter = 10.0; // pole of W(s) = alpha / (s + alpha)
  double p0 = 1.0;            // P(0) = p0 * I

  bool operator==(const GainConfig&) const = default;
};

/// Throws std::invalid_argument naming the violated constraint.
void validate(const GainConfig& g);

struct ControllerState {
  ThetaVec theta_hat = ThetaVec::Zero();
  ThetaVec z = ThetaVec::Zero();
  Mat5 P = Mat5::Identity();
  double mu = 0.0;
  Vec2 filt_y = Vec2::Zero();
  Regressor filt_Y = Regressor::Zero();
};

/// z(0) = 0, P(0) = p0 I, filters at rest, mu consistent with P(0).
ControllerState initial_controller_state(const ThetaVec& theta_hat0, const GainConfig& g);

class InvariantBreach : public std::runtime_error {
 public:
  explicit InvariantBreach(const std::string& what) : std::runtime_error(what) {}
};

struct TrackingErrors {
  Vec2 e;
  Vec2 ev;
  Vec2 eta;
};

/// e = q - q_other(t - T), e_v = qd - qd_other(t - T), eta = qd + lambda e.
TrackingErrors tracking_errors(const Vec2& q_self, const Vec2& qd_self,
                               const Vec2& q_other_delayed, const Vec2& qd_other_delayed,
                               double lambda);

/// tau = -Y theta_hat - K eta.
Vec2 control_torque(const Regressor& y_ctrl, const ThetaVec& theta_hat, const Mat2& K,
                    const Vec2& eta);

/// e_o = (tau + F) - Y_io theta_hat.
Vec2 prediction_error(const Vec2& tau, const Vec2& f_ext, const Regressor& y_io,
                      const ThetaVec& theta_hat);

/// One step of dw/dt = alpha (u - w) with u held over the step (exact for
/// piecewise-constant input).
template <typename Derived>
typename Derived::PlainObject filter_step(const Eigen::MatrixBase<Derived>& w,
                                          const Eigen::MatrixBase<Derived>& input,
                                          double alpha, double dt) {
  const double gain = -std::expm1(-alpha * dt);
  return w + gain * (input - w);
}

double min_eigenvalue(const Mat5& P);

/// mu = mu0 (1 - kappa0 ||P^-1||_2) with ||P^-1||_2 = 1 / lambda_min(P).
double forgetting_rate(const Mat5& P, double kappa0, double mu0);

struct CompositeRates {
  ThetaVec theta_hat_dot;
  ThetaVec z_dot;
  Mat5 P_dot;
  double mu = 0.0;
  double xi = 0.0;
};

/// Right-hand side of the composite law. (y_pred, e_pred) is either the raw
/// (Y_io, e_io) pair or the filtered (Y_w, e_w) pair.
CompositeRates composite_rates(const ControllerState& cs, const Regressor& y_ctrl,
                               const Vec2& eta, const Regressor& y_pred,
                               const Vec2& e_pred, const GainConfig& g);

/// Explicit Euler step of the composite law followed by re-symmetrization of P
/// and the invariant check.
ControllerState composite_update_step(const ControllerState& cs, const Regressor& y_ctrl,
                                      const Vec2& eta, const Regressor& y_pred,
                                      const Vec2& e_pred, const GainConfig& g, double dt);

ThetaVec classical_rate(const Regressor& y_ctrl, const Vec2& eta, const Mat5& gamma);

ThetaVec classical_update_step(const ThetaVec& theta_hat, const Regressor& y_ctrl,
                               const Vec2& eta, const Mat5& gamma, double dt);

/// Symmetrizes P in place and refreshes mu. Throws InvariantBreach when the
/// asymmetry exceeds `sym_tol` or lambda_min(P) < kappa0 - floor_tol.
void enforce_invariants(ControllerState& cs, const GainConfig& g, double sym_tol = 1e-9,
                        double floor_tol = 1e-6);

}  // namespace teleop

#endif  // TELEOP_CONTROLLER_HPP
