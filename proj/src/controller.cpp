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

#include "teleop/controller.hpp"

#include <sstream>

namespace teleop {
namespace {

bool is_spd(const Eigen::MatrixXd& m) {
  if (!m.allFinite() || (m - m.transpose()).cwiseAbs().maxCoeff() > 1e-12 * (1.0 + m.norm())) {
    return false;
  }
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(m, Eigen::EigenvaluesOnly);
  return eig.eigenvalues()(0) > 0.0;
}

bool positive(double v) { return std::isfinite(v) && v > 0.0; }

}  // namespace

void validate(const GainConfig& g) {
  if (!is_spd(g.K)) throw std::invalid_argument("gain K must be symmetric positive definite");
  if (!is_spd(g.Gamma)) {
    throw std::invalid_argument("gain Gamma must be symmetric positive definite");
  }
  if (!positive(g.lambda)) throw std::invalid_argument("gain lambda must be > 0");
  if (!positive(g.delta)) throw std::invalid_argument("gain delta must be > 0");
  if (!positive(g.alpha_gain)) throw std::invalid_argument("gain alpha must be > 0");
  if (!positive(g.kappa0)) throw std::invalid_argument("gain kappa0 must be > 0");
  if (!positive(g.mu0)) throw std::invalid_argument("gain mu0 must be > 0");
  if (!positive(g.alpha_filter)) throw std::invalid_argument("gain alpha_filter must be > 0");
  if (!positive(g.p0)) throw std::invalid_argument("initial P scale p0 must be > 0");
  if (g.p0 < g.kappa0) {
    throw std::invalid_argument("P(0) = p0 I must satisfy p0 >= kappa0");
  }
}

ControllerState initial_controller_state(const ThetaVec& theta_hat0, const GainConfig& g) {
  ControllerState cs;
  cs.theta_hat = theta_hat0;
  cs.P = g.p0 * Mat5::Identity();
  cs.mu = forgetting_rate(cs.P, g.kappa0, g.mu0);
  return cs;
}

TrackingErrors tracking_errors(const Vec2& q_self, const Vec2& qd_self,
                               const Vec2& q_other_delayed, const Vec2& qd_other_delayed,
                               double lambda) {
  TrackingErrors out;
  out.e = q_self - q_other_delayed;
  out.ev = qd_self - qd_other_delayed;
  out.eta = qd_self + lambda * out.e;
  return out;
}

Vec2 control_torque(const Regressor& y_ctrl, const ThetaVec& theta_hat, const Mat2& K,
                    const Vec2& eta) {
  return -y_ctrl * theta_hat - K * eta;
}

Vec2 prediction_error(const Vec2& tau, const Vec2& f_ext, const Regressor& y_io,
                      const ThetaVec& theta_hat) {
  return (tau + f_ext) - y_io * theta_hat;
}

double min_eigenvalue(const Mat5& P) {
  const Eigen::SelfAdjointEigenSolver<Mat5> eig(P, Eigen::EigenvaluesOnly);
  return eig.eigenvalues()(0);
}

double forgetting_rate(const Mat5& P, double kappa0, double mu0) {
  return mu0 * (1.0 - kappa0 / min_eigenvalue(P));
}

CompositeRates composite_rates(const ControllerState& cs, const Regressor& y_ctrl,
                               const Vec2& eta, const Regressor& y_pred,
                               const Vec2& e_pred, const GainConfig& g) {
  CompositeRates r;
  const ThetaVec drive = y_ctrl.transpose() * eta;
  r.mu = forgetting_rate(cs.P, g.kappa0, g.mu0);
  r.xi = g.alpha_gain * drive.norm() / g.kappa0;
  r.theta_hat_dot = g.Gamma * (drive + (r.xi + g.delta) * cs.z);
  r.z_dot = -r.mu * cs.z + y_pred.transpose() * e_pred - cs.P * r.theta_hat_dot;
  r.P_dot = -r.mu * cs.P + y_pred.transpose() * y_pred;
  return r;
}

ControllerState composite_update_step(const ControllerState& cs, const Regressor& y_ctrl,
                                      const Vec2& eta, const Regressor& y_pred,
                                      const Vec2& e_pred, const GainConfig& g, double dt) {
  if (!(dt > 0.0)) throw std::invalid_argument("composite_update_step needs dt > 0");
  const CompositeRates r = composite_rates(cs, y_ctrl, eta, y_pred, e_pred, g);
  ControllerState next = cs;
  next.theta_hat += dt * r.theta_hat_dot;
  next.z += dt * r.z_dot;
  next.P += dt * r.P_dot;
  enforce_invariants(next, g);
  return next;
}

ThetaVec classical_rate(const Regressor& y_ctrl, const Vec2& eta, const Mat5& gamma) {
  return gamma * (y_ctrl.transpose() * eta);
}

ThetaVec classical_update_step(const ThetaVec& theta_hat, const Regressor& y_ctrl,
                               const Vec2& eta, const Mat5& gamma, double dt) {
  if (!(dt > 0.0)) throw std::invalid_argument("classical_update_step needs dt > 0");
  return theta_hat + dt * classical_rate(y_ctrl, eta, gamma);
}

void enforce_invariants(ControllerState& cs, const GainConfig& g, double sym_tol,
                        double floor_tol) {
  const double asym = (cs.P - cs.P.transpose()).cwiseAbs().maxCoeff();
  if (!(asym <= sym_tol)) {
    std::ostringstream os;
    os << "P lost symmetry (max |P - P^T| = " << asym << "); reduce the step size";
    throw InvariantBreach(os.str());
  }
  cs.P = 0.5 * (cs.P + cs.P.transpose()).eval();
  const double lmin = min_eigenvalue(cs.P);
  if (!(lmin >= g.kappa0 - floor_tol)) {
    std::ostringstream os;
    os << "lambda_min(P) = " << lmin << " fell below kappa0 = " << g.kappa0
       << "; reduce the step size";
    throw InvariantBreach(os.str());
  }
  cs.mu = g.mu0 * (1.0 - g.kappa0 / lmin);
}

}  // namespace teleop
