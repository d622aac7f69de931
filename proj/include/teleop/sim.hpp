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

// Coupled master/slave simulation with delayed position/velocity exchange.
//
// Both plants, both adaptive laws and the regressor filters are integrated
// together with classical RK4 at a fixed step. Delayed reads go through the
// channel histories at every stage time; a stage whose delayed time lies
// beyond the newest stored sample reads that sample instead.

#ifndef TELEOP_SIM_HPP
#define TELEOP_SIM_HPP

#include "teleop/channel.hpp"
#include "teleop/controller.hpp"
#include "teleop/dynamics.hpp"
#include "teleop/lyapunov.hpp"
#include "teleop/metrics.hpp"
#include "teleop/stability.hpp"

#include <functional>
#include <stdexcept>
#include <string>
#include <cstddef>
#include <vector>

namespace teleop {

enum class ScenarioKind { kFreeMotion, kWall };
enum class ControllerMode { kComposite, kClassical };
enum class PredictionSource { kFiltered, kMeasured };

/// Rectangular operator force along task-space Y.
struct HumanForceProfile {
  double amplitude = 5.0;  // N
  double start = 2.0;      // s
  double stop = 8.0;       // s

  bool operator==(const HumanForceProfile&) const = default;
};

/// Penalty wall y <= position with stiffness in N/m.
struct WallConfig {
  double position = 0.6;
  double stiffness = 1.0e4;

  bool operator==(const WallConfig&) const = default;
};

struct SideConfig {
  ManipulatorParams params;
  GainConfig gains;
  DelayProfile delay;  // delay applied to the signals this side transmits
  ThetaVec theta_hat0 = ThetaVec::Zero();

  bool operator==(const SideConfig&) const = default;
};

struct ScenarioConfig {
  ScenarioKind scenario = ScenarioKind::kFreeMotion;
  ControllerMode mode = ControllerMode::kComposite;
  PredictionSource prediction = PredictionSource::kFiltered;
  HumanForceProfile human;
  double force_scale = 1.0;
  WallConfig wall;
  double dt = 1.0e-4;
  double horizon = 20.0;
  int log_stride = 1;
  SideConfig master;
  SideConfig slave;

  bool operator==(const ScenarioConfig&) const = default;
};

/// Master/slave arms, initial estimates and delays of the two-link example.
ScenarioConfig reference_scenario(ScenarioKind kind = ScenarioKind::kFreeMotion);

/// Throws std::invalid_argument, or AssumptionViolation for delay profiles.
void validate(const ScenarioConfig& cfg);

/// Task-space operator force (0, A) inside [start, stop), else zero.
Vec2 human_force(const HumanForceProfile& profile, double t);

/// Task-space wall reaction (0, -k (y - y_w)) once the end-effector passes y_w.
Vec2 environment_force(const ManipulatorParams& slave, const Vec2& q_s, const WallConfig& wall);

class NumericalDivergence : public std::runtime_error {
 public:
  explicit NumericalDivergence(const std::string& what) : std::runtime_error(what) {}
};

struct SideState {
  JointState plant;
  ControllerState ctrl;
};

struct SimState {
  SideState master;
  SideState slave;
};

struct SideOutputs {
  TrackingErrors err;
  Vec2 tau = Vec2::Zero();
  Vec2 f_ext = Vec2::Zero();  // joint-space external torque J^T F
  Vec2 qdd = Vec2::Zero();
  Vec2 q_other_delayed = Vec2::Zero();
  Vec2 qd_other_delayed = Vec2::Zero();
  Vec2 f_other_delayed = Vec2::Zero();
  Vec2 e_pred = Vec2::Zero();
  double mu = 0.0;
  double xi = 0.0;
};

struct StageOutputs {
  double t = 0.0;
  SideOutputs master;
  SideOutputs slave;
};

/// One row of the trajectory log, in CSV column order.
struct TrajectoryRecord {
  double t = 0.0;
  Vec2 q_m, q_s, qd_m, qd_s;
  ThetaVec theta_hat_m, theta_hat_s;
  Vec2 tau_m, tau_s;
  Vec2 f_h;  // master joint torque from the operator
  Vec2 f_e;  // slave joint torque from the environment
  Vec2 delta_p, delta_f;
  double lyapunov = 0.0;
  double mu_m = 0.0, mu_s = 0.0;
  double lambda_min_p_m = 0.0, lambda_min_p_s = 0.0;
};

class Simulator {
 public:
  explicit Simulator(ScenarioConfig cfg);

  /// Advances one fixed step and returns the outputs evaluated at the start
  /// of the step. When `start_record` is given it receives the log row for
  /// the pre-step state.
  StageOutputs step(TrajectoryRecord* start_record = nullptr);

  /// Outputs at the current time and state, without stepping.
  StageOutputs evaluate_now() const;

  /// Log row for the current state given its outputs.
  TrajectoryRecord make_record(const StageOutputs& out) const;

  double time() const { return static_cast<double>(steps_) * cfg_.dt; }
  long steps() const { return steps_; }
  const SimState& state() const { return state_; }
  const ScenarioConfig& config() const { return cfg_; }
  const StabilityConstants& constants() const { return constants_; }
  const LmiWitness& witness() const { return witness_; }
  bool witness_feasible() const { return witness_feasible_; }
  const ThetaVec& theta_master() const { return theta_m_; }
  const ThetaVec& theta_slave() const { return theta_s_; }

  static constexpr int kSideSize = 51;
  static constexpr int kStateSize = 2 * kSideSize;
  using StateVector = Eigen::Matrix<double, kStateSize, 1>;

  static StateVector pack(const SimState& s);
  static SimState unpack(const StateVector& x);

 private:
  StateVector derivative(double t, const StateVector& x, StageOutputs* out) const;
  void push_histories();

  ScenarioConfig cfg_;
  SimState state_;
  long steps_ = 0;
  ThetaVec theta_m_;
  ThetaVec theta_s_;
  Mat5 gamma_inv_m_;
  Mat5 gamma_inv_s_;
  StabilityConstants constants_;
  LmiWitness witness_;
  bool witness_feasible_ = false;

  SignalHistory q_m_hist_, qd_m_hist_, f_m_hist_;
  SignalHistory q_s_hist_, qd_s_hist_, f_s_hist_;
  LyapunovMonitor lyapunov_;
};

struct TrajectoryLog {
  std::vector<TrajectoryRecord> records;
  MetricAccumulator metrics;
  StabilityConstants constants;
  LmiWitness witness;
  bool witness_feasible = false;
  ThetaVec theta_m = ThetaVec::Zero();
  ThetaVec theta_s = ThetaVec::Zero();
};

/// Called after every step with the new time and state.
using StepObserver = std::function<void(double, const SimState&, const StageOutputs&)>;

/// Integrates from rest to the horizon, logging every `log_stride` steps plus
/// the final state. Step errors are rethrown with the failing time.
TrajectoryLog run_scenario(const ScenarioConfig& cfg, const StepObserver& observer = {});

struct LyapunovPoint {
  double t = 0.0;
  LyapunovTerms terms;
};

/// V(t) recomputed from logged records alone: eta from interpolated delayed
/// positions, integral terms by trapezoid over the stored samples. A log that
/// starts at t = 0 is taken to be at rest before; otherwise only records at
/// least max(h_m, h_s) after the first one are evaluated. Throws
/// std::invalid_argument when no record has enough history. Only every
/// `every`-th eligible record is evaluated; integrals still use all of them.
std::vector<LyapunovPoint> lyapunov_diagnostic(const std::vector<TrajectoryRecord>& records,
                                               const ScenarioConfig& cfg,
                                               const StabilityConstants& c,
                                               const LmiWitness& w, std::size_t every = 1);

std::string_view to_string(ScenarioKind k);
std::string_view to_string(ControllerMode m);
std::string_view to_string(PredictionSource p);

}  // namespace teleop

#endif  // TELEOP_SIM_HPP
