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

// Planar two-link manipulator model in the linearly parameterized form used
// by the adaptive controllers: M(q), C(q, qd), G(q), Jacobian, and the two
// regressors Y_io(q, qd, qdd) and Y(q, qd, e, e_v).

#ifndef TELEOP_DYNAMICS_HPP
#define TELEOP_DYNAMICS_HPP

#include <Eigen/Dense>

#include <stdexcept>
#include <string>

namespace teleop {

using Vec2 = Eigen::Vector2d;
using Mat2 = Eigen::Matrix2d;
using ThetaVec = Eigen::Matrix<double, 5, 1>;
using Mat5 = Eigen::Matrix<double, 5, 5>;
using Regressor = Eigen::Matrix<double, 2, 5>;

inline constexpr double kStandardGravity = 9.81;

/// Physical constants of one arm. Masses in kg, lengths in m.
struct ManipulatorParams {
  double m1 = 1.0;
  double m2 = 1.0;
  double l1 = 1.0;
  double l2 = 1.0;
  double g = kStandardGravity;

  bool operator==(const ManipulatorParams&) const = default;
};

struct JointState {
  Vec2 q = Vec2::Zero();
  Vec2 qd = Vec2::Zero();
};

struct DynamicsTerms {
  Mat2 M;
  Mat2 C;
  Vec2 G;
};

class SingularInertia : public std::runtime_error {
 public:
  explicit SingularInertia(const std::string& what) : std::runtime_error(what) {}
};

/// Throws std::invalid_argument unless every field is finite and > 0.
void validate(const ManipulatorParams& p);

/// Base parameters (l2^2 m2 + l1^2 (m1+m2), l1 l2 m2, l2^2 m2, l2 m2, l1 (m1+m2)).
ThetaVec theta_from_params(const ManipulatorParams& p);

/// Inertia, Coriolis and gravity terms. Gravity is g times the theta-weighted
/// cosines in both rows.
DynamicsTerms eval_dynamics(const ManipulatorParams& p, const JointState& s);

/// Same terms evaluated straight from a parameter vector and gravity.
DynamicsTerms eval_dynamics(const ThetaVec& theta, double g, const JointState& s);

/// dM/dt along qd. M only depends on q2, so this is dM/dq2 * qd2.
Mat2 inertia_rate(const ManipulatorParams& p, const JointState& s);

Mat2 jacobian(const ManipulatorParams& p, const Vec2& q);

/// End-effector position (x, y).
Vec2 forward_kinematics(const ManipulatorParams& p, const Vec2& q);

/// Y_io with Y_io * theta = M qdd + C qd + G.
Regressor regressor_full(const JointState& s, const Vec2& qdd, double g);

/// Y with Y * theta = M lambda e_v + C lambda e - G.
Regressor regressor_ctrl(const JointState& s, const Vec2& e, const Vec2& ev,
                         double lambda, double g);

/// qdd = M^-1 (F + tau - C qd - G). Throws SingularInertia when M cannot be
/// inverted reliably.
Vec2 forward_dynamics(const ManipulatorParams& p, const JointState& s,
                      const Vec2& tau, const Vec2& f_ext);

/// Kinetic plus gravitational potential energy; conserved when tau = F = 0.
double mechanical_energy(const ManipulatorParams& p, const JointState& s);

struct InertiaBounds {
  double rho_min = 0.0;
  double rho_max = 0.0;
};

/// Extreme eigenvalues of M(q) over a uniform q2 grid on [0, 2*pi).
InertiaBounds inertia_bounds(const ManipulatorParams& p, int grid_points = 10000);

}  // namespace teleop

#endif  // TELEOP_DYNAMICS_HPP
