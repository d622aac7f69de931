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

// Delay-dependent stability certificate for the closed loop.
//
// The certificate is the block matrix
//
//   [ pi1   0     0          -I        ]
//   [ 0     pi2  -I           0        ]
//   [ 0    -I    -R_m / h_m   0        ]  < 0
//   [ -I    0     0          -R_s / h_s ]
//
// with pi1 = -1/lambda_m + h_m r_m + nu_m and pi2 = -1/lambda_s + h_s r_s + nu_s
// (nu doubled in the forced-motion variant). With scalar witnesses R = r I
// every block is a multiple of I and the matrix splits into two 2x2 blocks.

#ifndef TELEOP_STABILITY_HPP
#define TELEOP_STABILITY_HPP

#include "teleop/channel.hpp"
#include "teleop/controller.hpp"
#include "teleop/dynamics.hpp"

#include <optional>
#include <string_view>

namespace teleop {

struct StabilityConstants {
  double rho_m_M = 0.0;
  double rho_s_M = 0.0;
  double h_m = 0.0;
  double h_s = 0.0;
  double d_m = 0.0;
  double d_s = 0.0;
  double k_m = 0.0;
  double k_s = 0.0;
  double lam_m = 0.0;
  double lam_s = 0.0;
  double nu_m = 0.0;
  double nu_s = 0.0;
  // Coriolis bound ||C(q, x) y|| <= c ||x|| ||y||; reported, not used.
  double c_m = 0.0;
  double c_s = 0.0;
};

/// nu_i = lambda_j (rho_j^M)^2 d_i^2 / ((1 - d_i) k_j^2).
double coupling_constant(double lambda_other, double rho_other_max, double d_self,
                         double k_other);

StabilityConstants stability_constants(const ManipulatorParams& master,
                                       const ManipulatorParams& slave,
                                       const GainConfig& gains_m, const GainConfig& gains_s,
                                       const DelayProfile& delay_m,
                                       const DelayProfile& delay_s);

enum class LmiMode { kTheorem, kProposition };

std::string_view to_string(LmiMode mode);

struct LmiWitness {
  double r_m = 0.0;
  double r_s = 0.0;
  LmiMode mode = LmiMode::kTheorem;
  double margin = 0.0;  // largest eigenvalue of the assembled matrix
};

/// Diagonal entries pi1, pi2 for the given witness.
std::pair<double, double> lmi_diagonal(const StabilityConstants& c, double r_m, double r_s,
                                       LmiMode mode);

/// The full 8x8 matrix (4x4 scalar blocks, each times I_2).
Eigen::Matrix<double, 8, 8> assemble_lmi(const StabilityConstants& c, double r_m,
                                         double r_s, LmiMode mode);

/// Largest eigenvalue from the two decoupled 2x2 blocks.
double lmi_margin(const StabilityConstants& c, double r_m, double r_s, LmiMode mode);

/// Decoupled Schur test: pi1 < -h_s / r_s and pi2 < -h_m / r_m.
bool schur_conditions_hold(const StabilityConstants& c, double r_m, double r_s,
                           LmiMode mode);

/// Log-grid search over [1e-4, 1e4]^2 followed by local refinement. Returns the
/// most negative margin found, or nullopt when no grid point is feasible.
std::optional<LmiWitness> lmi_feasible(const StabilityConstants& c, LmiMode mode,
                                       int grid = 200);

}  // namespace teleop

#endif  // TELEOP_STABILITY_HPP
