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

#include "teleop/stability.hpp"

#include <cmath>
#include <limits>

namespace teleop {
namespace {

// Largest eigenvalue of [[a, b], [b, c]].
double max_eig_sym2(double a, double b, double c) {
  const double mean = 0.5 * (a + c);
  const double half = 0.5 * (a - c);
  return mean + std::hypot(half, b);
}

double min_eig(const Mat2& m) {
  const Eigen::SelfAdjointEigenSolver<Mat2> eig(m, Eigen::EigenvaluesOnly);
  return eig.eigenvalues()(0);
}

}  // namespace

double coupling_constant(double lambda_other, double rho_other_max, double d_self,
                         double k_other) {
  return lambda_other * rho_other_max * rho_other_max * d_self * d_self /
         ((1.0 - d_self) * k_other * k_other);
}

StabilityConstants stability_constants(const ManipulatorParams& master,
                                       const ManipulatorParams& slave,
                                       const GainConfig& gains_m, const GainConfig& gains_s,
                                       const DelayProfile& delay_m,
                                       const DelayProfile& delay_s) {
  const DelayBounds bm = validate_profile(delay_m);
  const DelayBounds bs = validate_profile(delay_s);

  StabilityConstants c;
  c.rho_m_M = inertia_bounds(master).rho_max;
  c.rho_s_M = inertia_bounds(slave).rho_max;
  c.h_m = bm.h;
  c.h_s = bs.h;
  c.d_m = bm.d;
  c.d_s = bs.d;
  c.k_m = min_eig(gains_m.K);
  c.k_s = min_eig(gains_s.K);
  c.lam_m = gains_m.lambda;
  c.lam_s = gains_s.lambda;
  c.nu_m = coupling_constant(c.lam_s, c.rho_s_M, c.d_m, c.k_s);
  c.nu_s = coupling_constant(c.lam_m, c.rho_m_M, c.d_s, c.k_m);
  // ||C(q, x) y|| <= l1 l2 m2 sqrt(3) ||x|| ||y|| for this arm.
  c.c_m = std::sqrt(3.0) * master.l1 * master.l2 * master.m2;
  c.c_s = std::sqrt(3.0) * slave.l1 * slave.l2 * slave.m2;
  return c;
}

std::string_view to_string(LmiMode mode) {
  return mode == LmiMode::kTheorem ? "theorem" : "proposition";
}

std::pair<double, double> lmi_diagonal(const StabilityConstants& c, double r_m, double r_s,
                                       LmiMode mode) {
  const double scale = mode == LmiMode::kProposition ? 2.0 : 1.0;
  const double pi1 = -1.0 / c.lam_m + c.h_m * r_m + scale * c.nu_m;
  const double pi2 = -1.0 / c.lam_s + c.h_s * r_s + scale * c.nu_s;
  return {pi1, pi2};
}

Eigen::Matrix<double, 8, 8> assemble_lmi(const StabilityConstants& c, double r_m,
                                         double r_s, LmiMode mode) {
  const auto [pi1, pi2] = lmi_diagonal(c, r_m, r_s, mode);
  Eigen::Matrix4d blocks;
  blocks << pi1, 0.0, 0.0, -1.0,
      0.0, pi2, -1.0, 0.0,
      0.0, -1.0, -r_m / c.h_m, 0.0,
      -1.0, 0.0, 0.0, -r_s / c.h_s;
  Eigen::Matrix<double, 8, 8> out;
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j < 4; ++j) {
      out.block<2, 2>(2 * i, 2 * j) = blocks(i, j) * Mat2::Identity();
    }
  }
  return out;
}

double lmi_margin(const StabilityConstants& c, double r_m, double r_s, LmiMode mode) {
  const auto [pi1, pi2] = lmi_diagonal(c, r_m, r_s, mode);
  // Rows/cols (1, 4) and (2, 3) of the scalar-block matrix.
  const double a = max_eig_sym2(pi1, -1.0, -r_s / c.h_s);
  const double b = max_eig_sym2(pi2, -1.0, -r_m / c.h_m);
  return std::max(a, b);
}

bool schur_conditions_hold(const StabilityConstants& c, double r_m, double r_s,
                           LmiMode mode) {
  if (!(r_m > 0.0) || !(r_s > 0.0)) return false;
  const auto [pi1, pi2] = lmi_diagonal(c, r_m, r_s, mode);
  return pi1 < -c.h_s / r_s && pi2 < -c.h_m / r_m;
}

std::optional<LmiWitness> lmi_feasible(const StabilityConstants& c, LmiMode mode, int grid) {
  if (grid < 2) throw std::invalid_argument("lmi_feasible needs grid >= 2");
  const double lo = std::log(1e-4);
  const double hi = std::log(1e4);
  const double step = (hi - lo) / (grid - 1);
  auto margin_at = [&](double lm, double ls) {
    return lmi_margin(c, std::exp(lm), std::exp(ls), mode);
  };

  double best = std::numeric_limits<double>::infinity();
  double best_m = lo;
  double best_s = lo;
  for (int i = 0; i < grid; ++i) {
    for (int j = 0; j < grid; ++j) {
      const double lm = lo + i * step;
      const double ls = lo + j * step;
      const double v = margin_at(lm, ls);
      if (v < best) {
        best = v;
        best_m = lm;
        best_s = ls;
      }
    }
  }
  if (!(best < 0.0)) return std::nullopt;

  // Coordinate golden-section sweeps inside one grid cell of the best point.
  const double phi = 0.5 * (std::sqrt(5.0) - 1.0);
  for (int sweep = 0; sweep < 8; ++sweep) {
    for (int axis = 0; axis < 2; ++axis) {
      double a = (axis == 0 ? best_m : best_s) - step;
      double b = (axis == 0 ? best_m : best_s) + step;
      auto f = [&](double x) { return axis == 0 ? margin_at(x, best_s) : margin_at(best_m, x); };
      double x1 = b - phi * (b - a);
      double x2 = a + phi * (b - a);
      double f1 = f(x1);
      double f2 = f(x2);
      for (int it = 0; it < 60; ++it) {
        if (f1 < f2) {
          b = x2;
          x2 = x1;
          f2 = f1;
          x1 = b - phi * (b - a);
          f1 = f(x1);
        } else {
          a = x1;
          x1 = x2;
          f1 = f2;
          x2 = a + phi * (b - a);
          f2 = f(x2);
        }
      }
      const double x = 0.5 * (a + b);
      const double v = f(x);
      if (v < best) {
        best = v;
        (axis == 0 ? best_m : best_s) = x;
      }
    }
  }

  LmiWitness w;
  w.r_m = std::exp(best_m);
  w.r_s = std::exp(best_s);
  w.mode = mode;
  w.margin = lmi_margin(c, w.r_m, w.r_s, mode);
  return w;
}

}  // namespace teleop
