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

#include "teleop/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace teleop {

void validate(const ManipulatorParams& p) {
  auto positive = [](double v) { return std::isfinite(v) && v > 0.0; };
  if (!positive(p.m1) || !positive(p.m2) || !positive(p.l1) || !positive(p.l2) ||
      !positive(p.g)) {
    throw std::invalid_argument("manipulator parameters must be finite and positive");
  }
}

ThetaVec theta_from_params(const ManipulatorParams& p) {
  ThetaVec theta;
  theta << p.l2 * p.l2 * p.m2 + p.l1 * p.l1 * (p.m1 + p.m2),
      p.l1 * p.l2 * p.m2,
      p.l2 * p.l2 * p.m2,
      p.l2 * p.m2,
      p.l1 * (p.m1 + p.m2);
  return theta;
}

DynamicsTerms eval_dynamics(const ThetaVec& theta, double g, const JointState& s) {
  const double c2 = std::cos(s.q(1));
  const double s2 = std::sin(s.q(1));
  const double c1 = std::cos(s.q(0));
  const double c12 = std::cos(s.q(0) + s.q(1));
  const double qd1 = s.qd(0);
  const double qd2 = s.qd(1);

  DynamicsTerms out;
  out.M(0, 0) = theta(0) + 2.0 * theta(1) * c2;
  out.M(0, 1) = theta(2) + theta(1) * c2;
  out.M(1, 0) = out.M(0, 1);
  out.M(1, 1) = theta(2);

  out.C(0, 0) = -theta(1) * s2 * qd2;
  out.C(0, 1) = -theta(1) * s2 * (qd1 + qd2);
  out.C(1, 0) = theta(1) * s2 * qd1;
  out.C(1, 1) = 0.0;

  out.G(0) = g * theta(3) * c12 + g * theta(4) * c1;
  out.G(1) = g * theta(3) * c12;
  return out;
}

DynamicsTerms eval_dynamics(const ManipulatorParams& p, const JointState& s) {
  return eval_dynamics(theta_from_params(p), p.g, s);
}

Mat2 inertia_rate(const ManipulatorParams& p, const JointState& s) {
  const double b = p.l1 * p.l2 * p.m2 * std::sin(s.q(1)) * s.qd(1);
  Mat2 dm;
  dm << -2.0 * b, -b, -b, 0.0;
  return dm;
}

Mat2 jacobian(const ManipulatorParams& p, const Vec2& q) {
  const double s1 = std::sin(q(0));
  const double c1 = std::cos(q(0));
  const double s12 = std::sin(q(0) + q(1));
  const double c12 = std::cos(q(0) + q(1));
  Mat2 j;
  j << -p.l1 * s1 - p.l2 * s12, -p.l2 * s12,
      p.l1 * c1 + p.l2 * c12, p.l2 * c12;
  return j;
}

Vec2 forward_kinematics(const ManipulatorParams& p, const Vec2& q) {
  return {p.l1 * std::cos(q(0)) + p.l2 * std::cos(q(0) + q(1)),
          p.l1 * std::sin(q(0)) + p.l2 * std::sin(q(0) + q(1))};
}

Regressor regressor_full(const JointState& s, const Vec2& qdd, double g) {
  const double c2 = std::cos(s.q(1));
  const double s2 = std::sin(s.q(1));
  const double c1 = std::cos(s.q(0));
  const double c12 = std::cos(s.q(0) + s.q(1));
  const double qd1 = s.qd(0);
  const double qd2 = s.qd(1);

  Regressor y;
  y(0, 0) = qdd(0);
  y(0, 1) = 2.0 * c2 * qdd(0) + c2 * qdd(1) - 2.0 * s2 * qd1 * qd2 - s2 * qd2 * qd2;
  y(0, 2) = qdd(1);
  y(0, 3) = g * c12;
  y(0, 4) = g * c1;
  y(1, 0) = 0.0;
  y(1, 1) = c2 * qdd(0) + s2 * qd1 * qd1;
  y(1, 2) = qdd(0) + qdd(1);
  y(1, 3) = g * c12;
  y(1, 4) = 0.0;
  return y;
}

Regressor regressor_ctrl(const JointState& s, const Vec2& e, const Vec2& ev,
                         double lambda, double g) {
  const double c2 = std::cos(s.q(1));
  const double s2 = std::sin(s.q(1));
  const double c1 = std::cos(s.q(0));
  const double c12 = std::cos(s.q(0) + s.q(1));
  const double qd1 = s.qd(0);
  const double qd2 = s.qd(1);
  // M acts on a = lambda * e_v, C(q, qd) acts on b = lambda * e.
  const Vec2 a = lambda * ev;
  const Vec2 b = lambda * e;

  Regressor y;
  y(0, 0) = a(0);
  y(0, 1) = 2.0 * c2 * a(0) + c2 * a(1) - s2 * (qd2 * b(0) + (qd1 + qd2) * b(1));
  y(0, 2) = a(1);
  y(0, 3) = -g * c12;
  y(0, 4) = -g * c1;
  y(1, 0) = 0.0;
  y(1, 1) = c2 * a(0) + s2 * qd1 * b(0);
  y(1, 2) = a(0) + a(1);
  y(1, 3) = -g * c12;
  y(1, 4) = 0.0;
  return y;
}

Vec2 forward_dynamics(const ManipulatorParams& p, const JointState& s,
                      const Vec2& tau, const Vec2& f_ext) {
  const DynamicsTerms d = eval_dynamics(p, s);
  const double det = d.M.determinant();
  const double scale = d.M.cwiseAbs().maxCoeff();
  if (!std::isfinite(det) || std::abs(det) <= 1e-12 * scale * scale) {
    throw SingularInertia("inertia matrix is numerically singular");
  }
  const Vec2 rhs = f_ext + tau - d.C * s.qd - d.G;
  // Closed-form 2x2 solve keeps the result bit-reproducible across builds.
  return Vec2{d.M(1, 1) * rhs(0) - d.M(0, 1) * rhs(1),
              -d.M(1, 0) * rhs(0) + d.M(0, 0) * rhs(1)} /
         det;
}

double mechanical_energy(const ManipulatorParams& p, const JointState& s) {
  const ThetaVec th = theta_from_params(p);
  const DynamicsTerms d = eval_dynamics(th, p.g, s);
  const double kinetic = 0.5 * s.qd.dot(d.M * s.qd);
  const double potential =
      p.g * th(3) * std::sin(s.q(0) + s.q(1)) + p.g * th(4) * std::sin(s.q(0));
  return kinetic + potential;
}

InertiaBounds inertia_bounds(const ManipulatorParams& p, int grid_points) {
  if (grid_points < 1) {
    throw std::invalid_argument("inertia_bounds needs at least one grid point");
  }
  InertiaBounds b{std::numeric_limits<double>::infinity(), 0.0};
  const ThetaVec th = theta_from_params(p);
  JointState s;
  for (int k = 0; k < grid_points; ++k) {
    s.q(1) = 2.0 * std::numbers::pi * k / grid_points;
    const Mat2 m = eval_dynamics(th, p.g, s).M;
    const Eigen::SelfAdjointEigenSolver<Mat2> eig(m, Eigen::EigenvaluesOnly);
    b.rho_min = std::min(b.rho_min, eig.eigenvalues()(0));
    b.rho_max = std::max(b.rho_max, eig.eigenvalues()(1));
  }
  return b;
}

}  // namespace teleop
