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

#include "test_util.hpp"

#include <gtest/gtest.h>

#include <Eigen/Eigenvalues>

#include <cmath>

namespace teleop {
namespace {

const DelayProfile kMasterDelay{0.3, {{0.2, 2.0}, {0.1, 5.0}}};
const DelayProfile kSlaveDelay{0.8, {{0.3, 1.5}, {0.1, 5.0}}};

StabilityConstants reference_constants() {
  return stability_constants(test::master_arm(), test::slave_arm(), GainConfig{}, GainConfig{},
                             kMasterDelay, kSlaveDelay);
}

// Brute-force max eigenvalue of M(q2) for the two-link arm.
double rho_max_oracle(const ManipulatorParams& p) {
  const double t1 = p.l2 * p.l2 * p.m2 + p.l1 * p.l1 * (p.m1 + p.m2);
  const double t2 = p.l1 * p.l2 * p.m2;
  const double t3 = p.l2 * p.l2 * p.m2;
  double best = 0.0;
  for (int i = 0; i <= 20000; ++i) {
    const double c = std::cos(2.0 * M_PI * i / 20000.0);
    Mat2 m;
    m << t1 + 2 * t2 * c, t3 + t2 * c, t3 + t2 * c, t3;
    best = std::max(best, Eigen::SelfAdjointEigenSolver<Mat2>(m).eigenvalues()(1));
  }
  return best;
}

double assembled_max_eig(const StabilityConstants& c, double r_m, double r_s, LmiMode mode) {
  const Eigen::Matrix<double, 8, 8> a = assemble_lmi(c, r_m, r_s, mode);
  return Eigen::SelfAdjointEigenSolver<Eigen::Matrix<double, 8, 8>>(a).eigenvalues()(7);
}

TEST(CouplingConstant, Formula) {
  const double nu = coupling_constant(0.5, 1.1, 0.95, 100.0);
  EXPECT_NEAR(nu, 0.5 * 1.21 * 0.9025 / (0.05 * 1e4), 1e-15);
  EXPECT_NEAR(nu, 1.09e-3, 1e-5);
}

TEST(CouplingConstant, ConstantDelay) { EXPECT_EQ(coupling_constant(0.5, 1.1, 0.0, 100.0), 0.0); }

TEST(StabilityConstants, ReferenceSetup) {
  const StabilityConstants c = reference_constants();
  EXPECT_NEAR(c.h_m, 0.6, 1e-12);
  EXPECT_NEAR(c.h_s, 1.2, 1e-12);
  EXPECT_NEAR(c.d_m, 0.9, 1e-12);
  EXPECT_NEAR(c.d_s, 0.95, 1e-12);
  EXPECT_NEAR(c.k_m, 100.0, 1e-9);
  EXPECT_NEAR(c.k_s, 100.0, 1e-9);
  EXPECT_EQ(c.lam_m, 0.5);
  EXPECT_EQ(c.lam_s, 0.5);
  EXPECT_NEAR(c.rho_m_M, rho_max_oracle(test::master_arm()), 1e-6);
  EXPECT_NEAR(c.rho_s_M, rho_max_oracle(test::slave_arm()), 1e-6);
  EXPECT_NEAR(c.nu_m, coupling_constant(0.5, c.rho_s_M, 0.9, 100.0), 1e-15);
  EXPECT_NEAR(c.nu_s, coupling_constant(0.5, c.rho_m_M, 0.95, 100.0), 1e-15);
  EXPECT_LT(c.nu_m, 0.01);
  EXPECT_LT(c.nu_s, 0.01);
}

TEST(StabilityConstants, KIsSmallestEigenvalue) {
  GainConfig g;
  g.K << 120.0, 10.0, 10.0, 80.0;
  const StabilityConstants c =
      stability_constants(test::master_arm(), test::slave_arm(), g, GainConfig{}, kMasterDelay,
                          kSlaveDelay);
  EXPECT_NEAR(c.k_m, 100.0 - std::sqrt(400.0 + 100.0), 1e-9);
  EXPECT_NEAR(c.k_s, 100.0, 1e-9);
}

TEST(StabilityConstants, PropagatesDelayViolation) {
  const DelayProfile fast{0.5, {{0.25, 5.0}}};
  EXPECT_THROW(stability_constants(test::master_arm(), test::slave_arm(), GainConfig{},
                                   GainConfig{}, fast, kSlaveDelay),
               AssumptionViolation);
}

TEST(LmiDiagonal, UnitWitnessTheoremMode) {
  const StabilityConstants c = reference_constants();
  const auto [pi1, pi2] = lmi_diagonal(c, 1.0, 1.0, LmiMode::kTheorem);
  EXPECT_NEAR(pi1, -2.0 + 0.6 + c.nu_m, 1e-12);
  EXPECT_NEAR(pi2, -2.0 + 1.2 + c.nu_s, 1e-12);
  EXPECT_NEAR(pi1, -1.399, 1e-2);
  EXPECT_NEAR(pi2, -0.799, 1e-2);
  EXPECT_LT(pi1, -1.2);
  EXPECT_LT(pi2, -0.6);
}

TEST(LmiDiagonal, PropositionModeDoublesCoupling) {
  const StabilityConstants c = reference_constants();
  const auto [a1, a2] = lmi_diagonal(c, 1.0, 1.0, LmiMode::kTheorem);
  const auto [b1, b2] = lmi_diagonal(c, 1.0, 1.0, LmiMode::kProposition);
  EXPECT_NEAR(b1 - a1, c.nu_m, 1e-15);
  EXPECT_NEAR(b2 - a2, c.nu_s, 1e-15);
}

TEST(LmiWitnessCheck, UnitWitnessAcceptedInBothModes) {
  const StabilityConstants c = reference_constants();
  for (LmiMode mode : {LmiMode::kTheorem, LmiMode::kProposition}) {
    EXPECT_TRUE(schur_conditions_hold(c, 1.0, 1.0, mode)) << to_string(mode);
    const double margin = lmi_margin(c, 1.0, 1.0, mode);
    EXPECT_NEAR(margin, assembled_max_eig(c, 1.0, 1.0, mode), 1e-9);
    EXPECT_LT(margin, -0.05);
  }
}

TEST(LmiFeasible, ReferenceSetupBothModes) {
  const StabilityConstants c = reference_constants();
  for (LmiMode mode : {LmiMode::kTheorem, LmiMode::kProposition}) {
    const auto w = lmi_feasible(c, mode);
    ASSERT_TRUE(w.has_value()) << to_string(mode);
    EXPECT_GT(w->r_m, 0.0);
    EXPECT_GT(w->r_s, 0.0);
    EXPECT_EQ(w->mode, mode);
    EXPECT_LT(w->margin, 0.0);
    EXPECT_NEAR(w->margin, assembled_max_eig(c, w->r_m, w->r_s, mode), 1e-9);
    EXPECT_TRUE(schur_conditions_hold(c, w->r_m, w->r_s, mode));
    // The search should do at least as well as the unit witness.
    EXPECT_LE(w->margin, lmi_margin(c, 1.0, 1.0, mode) + 1e-12);
  }
}

TEST(LmiFeasible, InfeasibleWhenLambdaUnbounded) {
  StabilityConstants c = reference_constants();
  c.lam_m = c.lam_s = std::numeric_limits<double>::infinity();
  c.nu_m = c.nu_s = 0.0;
  EXPECT_FALSE(lmi_feasible(c, LmiMode::kTheorem).has_value());
  EXPECT_FALSE(lmi_feasible(c, LmiMode::kProposition).has_value());
}

TEST(LmiFeasible, RejectsTinyGrid) {
  EXPECT_THROW(lmi_feasible(reference_constants(), LmiMode::kTheorem, 1), std::invalid_argument);
}

TEST(SchurConditions, NonPositiveWitnessRejected) {
  const StabilityConstants c = reference_constants();
  EXPECT_FALSE(schur_conditions_hold(c, 0.0, 1.0, LmiMode::kTheorem));
  EXPECT_FALSE(schur_conditions_hold(c, 1.0, -1.0, LmiMode::kTheorem));
}

StabilityConstants random_constants(test::Sampler& s) {
  StabilityConstants c;
  c.h_m = s.uniform(0.01, 1.0);
  c.h_s = s.uniform(0.01, 1.0);
  c.lam_m = s.uniform(0.05, 2.0);
  c.lam_s = s.uniform(0.05, 2.0);
  c.nu_m = s.uniform(0.0, 0.2);
  c.nu_s = s.uniform(0.0, 0.2);
  return c;
}

TEST(SchurConditions, AgreeWithAssembledMatrix) {
  test::Sampler s(11);
  int feasible = 0;
  for (int i = 0; i < 1000; ++i) {
    const StabilityConstants c = random_constants(s);
    const double r_m = std::exp(s.uniform(-2.0, 2.0));
    const double r_s = std::exp(s.uniform(-2.0, 2.0));
    const LmiMode mode = i % 2 ? LmiMode::kProposition : LmiMode::kTheorem;
    const double top = assembled_max_eig(c, r_m, r_s, mode);
    if (std::abs(top) < 1e-9) continue;
    const bool direct = top < 0.0;
    EXPECT_EQ(schur_conditions_hold(c, r_m, r_s, mode), direct) << "sample " << i;
    EXPECT_NEAR(lmi_margin(c, r_m, r_s, mode), top, 1e-9);
    feasible += direct;
  }
  EXPECT_GT(feasible, 50);
  EXPECT_LT(feasible, 950);
}

TEST(SchurConditions, Monotonicity) {
  test::Sampler s(12);
  int checked = 0;
  for (int i = 0; i < 2000; ++i) {
    StabilityConstants c = random_constants(s);
    const double r_m = std::exp(s.uniform(-2.0, 2.0));
    const double r_s = std::exp(s.uniform(-2.0, 2.0));
    if (!schur_conditions_hold(c, r_m, r_s, LmiMode::kTheorem)) continue;
    // Tighter lambda and less coupling only lower pi; shorter h slackens both sides.
    StabilityConstants tighter = c;
    tighter.lam_m *= s.uniform(0.5, 1.0);
    tighter.lam_s *= s.uniform(0.5, 1.0);
    tighter.nu_m *= s.uniform(0.0, 1.0);
    tighter.nu_s *= s.uniform(0.0, 1.0);
    tighter.h_m *= s.uniform(0.5, 1.0);
    tighter.h_s *= s.uniform(0.5, 1.0);
    EXPECT_TRUE(schur_conditions_hold(tighter, r_m, r_s, LmiMode::kTheorem)) << "sample " << i;
    ++checked;
  }
  EXPECT_GT(checked, 20);
}

TEST(SchurConditions, PropositionModeImpliesTheoremMode) {
  test::Sampler s(13);
  int prop = 0;
  for (int i = 0; i < 1000; ++i) {
    const StabilityConstants c = random_constants(s);
    const double r_m = std::exp(s.uniform(-2.0, 2.0));
    const double r_s = std::exp(s.uniform(-2.0, 2.0));
    if (schur_conditions_hold(c, r_m, r_s, LmiMode::kProposition)) {
      ++prop;
      EXPECT_TRUE(schur_conditions_hold(c, r_m, r_s, LmiMode::kTheorem));
    }
    if (lmi_feasible(c, LmiMode::kProposition, 40)) {
      EXPECT_TRUE(lmi_feasible(c, LmiMode::kTheorem, 40).has_value());
    }
  }
  EXPECT_GT(prop, 10);
}

}  // namespace
}  // namespace teleop
