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

#include "teleop/sim.hpp"

#include "teleop/rk4.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace teleop {
namespace {

constexpr double kDivergenceLimit = 1e6;

// Offsets inside one side's block of the packed state.
constexpr int kQ = 0;
constexpr int kQd = 2;
constexpr int kTheta = 4;
constexpr int kZ = 9;
constexpr int kP = 14;
constexpr int kFy = 39;
constexpr int kFY = 41;

void pack_side(const SideState& s, Eigen::Ref<Eigen::VectorXd> x) {
  x.segment<2>(kQ) = s.plant.q;
  x.segment<2>(kQd) = s.plant.qd;
  x.segment<5>(kTheta) = s.ctrl.theta_hat;
  x.segment<5>(kZ) = s.ctrl.z;
  x.segment<25>(kP) = s.ctrl.P.reshaped();
  x.segment<2>(kFy) = s.ctrl.filt_y;
  x.segment<10>(kFY) = s.ctrl.filt_Y.reshaped();
}

SideState unpack_side(const Eigen::Ref<const Eigen::VectorXd>& x) {
  SideState s;
  s.plant.q = x.segment<2>(kQ);
  s.plant.qd = x.segment<2>(kQd);
  s.ctrl.theta_hat = x.segment<5>(kTheta);
  s.ctrl.z = x.segment<5>(kZ);
  s.ctrl.P = x.segment<25>(kP).reshaped(5, 5);
  s.ctrl.filt_y = x.segment<2>(kFy);
  s.ctrl.filt_Y = x.segment<10>(kFY).reshaped(2, 5);
  return s;
}

double history_span(const ScenarioConfig& cfg) {
  const double h = std::max(validate_profile(cfg.master.delay).h,
                            validate_profile(cfg.slave.delay).h);
  return h + 2.0 * cfg.dt;
}

void check_positive(double v, const char* what) {
  if (!std::isfinite(v) || !(v > 0.0)) {
    throw std::invalid_argument(std::string(what) + " must be finite and > 0");
  }
}

}  // namespace

ScenarioConfig reference_scenario(ScenarioKind kind) {
  ScenarioConfig cfg;
  cfg.scenario = kind;
  cfg.master.params = {1.5, 0.75, 0.5, 0.3, kStandardGravity};
  cfg.slave.params = {2.5, 1.5, 0.5, 0.3, kStandardGravity};
  cfg.master.delay = {0.3, {{0.2, 2.0}, {0.1, 5.0}}};
  cfg.slave.delay = {0.8, {{0.3, 1.5}, {0.1, 5.0}}};
  cfg.master.theta_hat0 << 0.4, 0.1, 0.2, 0.32, 0.7;
  cfg.slave.theta_hat0 << 0.7, 0.2, 0.3, 0.5, 1.7;
  if (kind == ScenarioKind::kWall) {
    cfg.human.amplitude = 40.0;
    cfg.human.stop = 15.0;
    cfg.horizon = 30.0;
  }
  return cfg;
}

void validate(const ScenarioConfig& cfg) {
  check_positive(cfg.dt, "dt");
  if (!std::isfinite(cfg.horizon) || cfg.horizon < 0.0) {
    throw std::invalid_argument("horizon must be finite and >= 0");
  }
  if (cfg.log_stride < 1) throw std::invalid_argument("log_stride must be >= 1");
  if (!std::isfinite(cfg.force_scale)) throw std::invalid_argument("force_scale must be finite");
  if (!std::isfinite(cfg.human.amplitude) || !std::isfinite(cfg.human.start) ||
      !std::isfinite(cfg.human.stop) || cfg.human.stop < cfg.human.start) {
    throw std::invalid_argument("human force window must be finite with stop >= start");
  }
  if (!std::isfinite(cfg.wall.position) || !std::isfinite(cfg.wall.stiffness) ||
      cfg.wall.stiffness < 0.0) {
    throw std::invalid_argument("wall stiffness must be finite and >= 0");
  }
  for (const SideConfig* side : {&cfg.master, &cfg.slave}) {
    validate(side->params);
    validate(side->gains);
    validate_profile(side->delay);
    if (!side->theta_hat0.allFinite()) {
      throw std::invalid_argument("initial parameter estimate must be finite");
    }
  }
}

Vec2 human_force(const HumanForceProfile& profile, double t) {
  if (t >= profile.start && t < profile.stop) return {0.0, profile.amplitude};
  return Vec2::Zero();
}

Vec2 environment_force(const ManipulatorParams& slave, const Vec2& q_s,
                       const WallConfig& wall) {
  const double y = forward_kinematics(slave, q_s)(1);
  if (wall.stiffness > 0.0 && y > wall.position) {
    return {0.0, -wall.stiffness * (y - wall.position)};
  }
  return Vec2::Zero();
}

Simulator::Simulator(ScenarioConfig cfg)
    : cfg_((validate(cfg), std::move(cfg))),
      theta_m_(theta_from_params(cfg_.master.params)),
      theta_s_(theta_from_params(cfg_.slave.params)),
      constants_(stability_constants(cfg_.master.params, cfg_.slave.params,
                                     cfg_.master.gains, cfg_.slave.gains, cfg_.master.delay,
                                     cfg_.slave.delay)),
      q_m_hist_(cfg_.dt, history_span(cfg_), Vec2::Zero()),
      qd_m_hist_(cfg_.dt, history_span(cfg_), Vec2::Zero()),
      f_m_hist_(cfg_.dt, history_span(cfg_), Vec2::Zero()),
      q_s_hist_(cfg_.dt, history_span(cfg_), Vec2::Zero()),
      qd_s_hist_(cfg_.dt, history_span(cfg_), Vec2::Zero()),
      f_s_hist_(cfg_.dt, history_span(cfg_), Vec2::Zero()),
      lyapunov_(cfg_.dt, history_span(cfg_), Vec2::Zero(), Vec2::Zero()) {
  gamma_inv_m_ = cfg_.master.gains.Gamma.inverse();
  gamma_inv_s_ = cfg_.slave.gains.Gamma.inverse();
  state_.master.ctrl = initial_controller_state(cfg_.master.theta_hat0, cfg_.master.gains);
  state_.slave.ctrl = initial_controller_state(cfg_.slave.theta_hat0, cfg_.slave.gains);
  if (auto w = lmi_feasible(constants_, LmiMode::kTheorem)) {
    witness_ = *w;
    witness_feasible_ = true;
  } else {
    witness_ = {1.0, 1.0, LmiMode::kTheorem, lmi_margin(constants_, 1.0, 1.0, LmiMode::kTheorem)};
  }
  push_histories();
}

Simulator::StateVector Simulator::pack(const SimState& s) {
  StateVector x;
  pack_side(s.master, x.segment<kSideSize>(0));
  pack_side(s.slave, x.segment<kSideSize>(kSideSize));
  return x;
}

SimState Simulator::unpack(const StateVector& x) {
  return {unpack_side(x.segment<kSideSize>(0)), unpack_side(x.segment<kSideSize>(kSideSize))};
}

void Simulator::push_histories() {
  const double t = time();
  const Vec2 f_m = jacobian(cfg_.master.params, state_.master.plant.q).transpose() *
                   (cfg_.force_scale * human_force(cfg_.human, t));
  Vec2 f_s = Vec2::Zero();
  if (cfg_.scenario == ScenarioKind::kWall) {
    f_s = jacobian(cfg_.slave.params, state_.slave.plant.q).transpose() *
          environment_force(cfg_.slave.params, state_.slave.plant.q, cfg_.wall);
  }
  q_m_hist_.push(t, state_.master.plant.q);
  qd_m_hist_.push(t, state_.master.plant.qd);
  f_m_hist_.push(t, f_m);
  q_s_hist_.push(t, state_.slave.plant.q);
  qd_s_hist_.push(t, state_.slave.plant.qd);
  f_s_hist_.push(t, f_s);
  lyapunov_.push(t, state_.master.plant.qd, state_.slave.plant.qd);
}

Simulator::StateVector Simulator::derivative(double t, const StateVector& x,
                                             StageOutputs* out) const {
  const SimState s = unpack(x);
  StateVector dx = StateVector::Zero();
  const double latest = q_m_hist_.latest_time();

  struct Link {
    const SideConfig& cfg;
    const SideState& self;
    const SignalHistory& q_other;
    const SignalHistory& qd_other;
    const SignalHistory& f_other;
    const DelayProfile& other_delay;
    bool is_master;
  };
  const Link links[2] = {
      {cfg_.master, s.master, q_s_hist_, qd_s_hist_, f_s_hist_, cfg_.slave.delay, true},
      {cfg_.slave, s.slave, q_m_hist_, qd_m_hist_, f_m_hist_, cfg_.master.delay, false},
  };

  for (int side = 0; side < 2; ++side) {
    const Link& L = links[side];
    const GainConfig& g = L.cfg.gains;
    const JointState& plant = L.self.plant;
    const ControllerState& cs = L.self.ctrl;
    const double grav = L.cfg.params.g;

    const double read_t = std::min(t - delay_value(L.other_delay, t), latest);
    SideOutputs o;
    o.q_other_delayed = L.q_other.sample(read_t);
    o.qd_other_delayed = L.qd_other.sample(read_t);
    o.f_other_delayed = L.f_other.sample(read_t);
    o.err = tracking_errors(plant.q, plant.qd, o.q_other_delayed, o.qd_other_delayed, g.lambda);

    const Regressor y_ctrl = regressor_ctrl(plant, o.err.e, o.err.ev, g.lambda, grav);
    o.tau = control_torque(y_ctrl, cs.theta_hat, g.K, o.err.eta);
    if (L.is_master) {
      o.f_ext = jacobian(L.cfg.params, plant.q).transpose() *
                (cfg_.force_scale * human_force(cfg_.human, t));
    } else if (cfg_.scenario == ScenarioKind::kWall) {
      o.f_ext = jacobian(L.cfg.params, plant.q).transpose() *
                environment_force(L.cfg.params, plant.q, cfg_.wall);
    }
    o.qdd = forward_dynamics(L.cfg.params, plant, o.tau, o.f_ext);

    auto d = dx.segment<kSideSize>(side * kSideSize);
    d.segment<2>(kQ) = plant.qd;
    d.segment<2>(kQd) = o.qdd;

    if (cfg_.mode == ControllerMode::kComposite) {
      const Regressor y_io = regressor_full(plant, o.qdd, grav);
      const Vec2 y_meas = o.tau + o.f_ext;
      Regressor y_pred;
      if (cfg_.prediction == PredictionSource::kFiltered) {
        y_pred = cs.filt_Y;
        o.e_pred = cs.filt_y - cs.filt_Y * cs.theta_hat;
      } else {
        y_pred = y_io;
        o.e_pred = prediction_error(o.tau, o.f_ext, y_io, cs.theta_hat);
      }
      const CompositeRates r = composite_rates(cs, y_ctrl, o.err.eta, y_pred, o.e_pred, g);
      o.mu = r.mu;
      o.xi = r.xi;
      d.segment<5>(kTheta) = r.theta_hat_dot;
      d.segment<5>(kZ) = r.z_dot;
      d.segment<25>(kP) = r.P_dot.reshaped();
      d.segment<2>(kFy) = g.alpha_filter * (y_meas - cs.filt_y);
      d.segment<10>(kFY) = (g.alpha_filter * (y_io - cs.filt_Y)).reshaped();
    } else {
      d.segment<5>(kTheta) = classical_rate(y_ctrl, o.err.eta, g.Gamma);
      o.mu = forgetting_rate(cs.P, g.kappa0, g.mu0);
    }
    if (out != nullptr) (L.is_master ? out->master : out->slave) = o;
  }
  if (out != nullptr) out->t = t;
  return dx;
}

StageOutputs Simulator::evaluate_now() const {
  StageOutputs out;
  derivative(time(), pack(state_), &out);
  return out;
}

StageOutputs Simulator::step(TrajectoryRecord* start_record) {
  const double t = time();
  const double h = cfg_.dt;
  const StateVector x = pack(state_);
  StageOutputs out;
  bool first = true;
  auto f = [&](double ts, const StateVector& xs) {
    const StateVector dx = derivative(ts, xs, first ? &out : nullptr);
    first = false;
    return dx;
  };
  const StateVector next = rk4_step(f, t, x, h);
  if (start_record != nullptr) *start_record = make_record(out);

  if (!next.allFinite() || next.cwiseAbs().maxCoeff() > kDivergenceLimit) {
    std::ostringstream os;
    os << "numerical divergence at t=" << t + h << " (state magnitude "
       << next.cwiseAbs().maxCoeff() << "); reduce dt or check gains";
    throw NumericalDivergence(os.str());
  }
  state_ = unpack(next);
  if (cfg_.mode == ControllerMode::kComposite) {
    enforce_invariants(state_.master.ctrl, cfg_.master.gains);
    enforce_invariants(state_.slave.ctrl, cfg_.slave.gains);
  } else {
    state_.master.ctrl.mu = forgetting_rate(state_.master.ctrl.P, cfg_.master.gains.kappa0,
                                            cfg_.master.gains.mu0);
    state_.slave.ctrl.mu = forgetting_rate(state_.slave.ctrl.P, cfg_.slave.gains.kappa0,
                                           cfg_.slave.gains.mu0);
  }
  ++steps_;
  push_histories();
  return out;
}

TrajectoryRecord Simulator::make_record(const StageOutputs& out) const {
  TrajectoryRecord r;
  const SideState& m = state_.master;
  const SideState& s = state_.slave;
  r.t = out.t;
  r.q_m = m.plant.q;
  r.q_s = s.plant.q;
  r.qd_m = m.plant.qd;
  r.qd_s = s.plant.qd;
  r.theta_hat_m = m.ctrl.theta_hat;
  r.theta_hat_s = s.ctrl.theta_hat;
  r.tau_m = out.master.tau;
  r.tau_s = out.slave.tau;
  r.f_h = out.master.f_ext;
  r.f_e = out.slave.f_ext;
  // The slave receives q_m(t - T_m); the master receives F_s(t - T_s).
  r.delta_p = delta_p(out.slave.q_other_delayed, s.plant.q);
  r.delta_f = delta_f(out.master.f_ext, out.master.f_other_delayed);
  r.mu_m = m.ctrl.mu;
  r.mu_s = s.ctrl.mu;
  r.lambda_min_p_m = min_eigenvalue(m.ctrl.P);
  r.lambda_min_p_s = min_eigenvalue(s.ctrl.P);

  LyapunovSide lm;
  lm.q = m.plant.q;
  lm.eta = out.master.err.eta;
  lm.M = eval_dynamics(cfg_.master.params, m.plant).M;
  lm.theta_tilde = theta_m_ - m.ctrl.theta_hat;
  lm.gamma_inv = gamma_inv_m_;
  LyapunovSide ls;
  ls.q = s.plant.q;
  ls.eta = out.slave.err.eta;
  ls.M = eval_dynamics(cfg_.slave.params, s.plant).M;
  ls.theta_tilde = theta_s_ - s.ctrl.theta_hat;
  ls.gamma_inv = gamma_inv_s_;
  r.lyapunov = lyapunov_
                   .evaluate(out.t, lm, ls, delay_value(cfg_.master.delay, out.t),
                             delay_value(cfg_.slave.delay, out.t), constants_, witness_)
                   .total();
  return r;
}

TrajectoryLog run_scenario(const ScenarioConfig& cfg, const StepObserver& observer) {
  Simulator sim(cfg);
  TrajectoryLog log;
  log.constants = sim.constants();
  log.witness = sim.witness();
  log.witness_feasible = sim.witness_feasible();
  log.theta_m = sim.theta_master();
  log.theta_s = sim.theta_slave();

  auto keep = [&log](const TrajectoryRecord& rec) {
    log.metrics.accumulate(rec.delta_p, rec.delta_f, rec.t);
  };
  const long total = std::lround(cfg.horizon / cfg.dt);
  log.records.reserve(static_cast<std::size_t>(total / cfg.log_stride + 2));
  for (long n = 0; n < total; ++n) {
    TrajectoryRecord rec;
    StageOutputs out;
    try {
      out = sim.step(&rec);
    } catch (const InvariantBreach& e) {
      std::ostringstream os;
      os << "t=" << sim.time() << ": " << e.what();
      throw InvariantBreach(os.str());
    } catch (const SingularInertia& e) {
      std::ostringstream os;
      os << "t=" << sim.time() << ": " << e.what();
      throw SingularInertia(os.str());
    }
    keep(rec);
    if (n % cfg.log_stride == 0) log.records.push_back(rec);
    if (observer) observer(sim.time(), sim.state(), out);
  }
  const TrajectoryRecord last = sim.make_record(sim.evaluate_now());
  keep(last);
  log.records.push_back(last);
  return log;
}

namespace {

class RecordSeries {
 public:
  explicit RecordSeries(const std::vector<TrajectoryRecord>& rs)
      : rs_(rs), rest_before_(rs.front().t == 0.0) {}

  template <typename Field>
  Vec2 at(double t, Field field) const {
    if (t < rs_.front().t) {
      if (!rest_before_) throw std::invalid_argument("read before the start of the log");
      return Vec2::Zero();
    }
    auto it = std::upper_bound(rs_.begin(), rs_.end(), t,
                               [](double x, const TrajectoryRecord& r) { return x < r.t; });
    if (it == rs_.end()) return field(rs_.back());
    const auto& hi = *it;
    const auto& lo = *(it - 1);
    const double f = (t - lo.t) / (hi.t - lo.t);
    return (1.0 - f) * field(lo) + f * field(hi);
  }

  // Trapezoid of weight(u) * |qd(u)|^2 over [a, b] on the record grid.
  template <typename Field, typename Weight>
  double integral(double a, double b, Field qd, Weight weight) const {
    auto g = [&](double u) { return weight(u) * at(u, qd).squaredNorm(); };
    double sum = 0.0;
    const double start = std::max(a, rs_.front().t);
    if (start >= b) return 0.0;
    auto it = std::upper_bound(rs_.begin(), rs_.end(), start,
                               [](double x, const TrajectoryRecord& r) { return x < r.t; });
    double lo = start;
    for (; it != rs_.end() && it->t < b; ++it) {
      sum += 0.5 * (it->t - lo) * (g(lo) + g(it->t));
      lo = it->t;
    }
    sum += 0.5 * (b - lo) * (g(lo) + g(b));
    return sum;
  }

 private:
  const std::vector<TrajectoryRecord>& rs_;
  bool rest_before_;
};

}  // namespace

std::vector<LyapunovPoint> lyapunov_diagnostic(const std::vector<TrajectoryRecord>& records,
                                               const ScenarioConfig& cfg,
                                               const StabilityConstants& c,
                                               const LmiWitness& w, std::size_t every) {
  if (records.empty()) throw std::invalid_argument("empty trajectory log");
  if (every == 0) throw std::invalid_argument("evaluation stride must be >= 1");
  const RecordSeries series(records);
  const double h = std::max(c.h_m, c.h_s);
  const double first = records.front().t == 0.0 ? 0.0 : records.front().t + h;
  const ThetaVec theta_m = theta_from_params(cfg.master.params);
  const ThetaVec theta_s = theta_from_params(cfg.slave.params);
  const Mat5 gi_m = cfg.master.gains.Gamma.inverse();
  const Mat5 gi_s = cfg.slave.gains.Gamma.inverse();
  auto q_m = [](const TrajectoryRecord& r) { return r.q_m; };
  auto q_s = [](const TrajectoryRecord& r) { return r.q_s; };
  auto qd_m = [](const TrajectoryRecord& r) { return r.qd_m; };
  auto qd_s = [](const TrajectoryRecord& r) { return r.qd_s; };

  std::vector<LyapunovPoint> out;
  std::size_t eligible = 0;
  for (const auto& r : records) {
    if (r.t < first) continue;
    if (eligible++ % every != 0) continue;
    const double t = r.t;
    const double tm = delay_value(cfg.master.delay, t);
    const double ts = delay_value(cfg.slave.delay, t);
    LyapunovSide m;
    m.q = r.q_m;
    m.eta = r.qd_m + cfg.master.gains.lambda * (r.q_m - series.at(t - ts, q_s));
    m.M = eval_dynamics(cfg.master.params, {r.q_m, r.qd_m}).M;
    m.theta_tilde = theta_m - r.theta_hat_m;
    m.gamma_inv = gi_m;
    LyapunovSide s;
    s.q = r.q_s;
    s.eta = r.qd_s + cfg.slave.gains.lambda * (r.q_s - series.at(t - tm, q_m));
    s.M = eval_dynamics(cfg.slave.params, {r.q_s, r.qd_s}).M;
    s.theta_tilde = theta_s - r.theta_hat_s;
    s.gamma_inv = gi_s;

    LyapunovPoint p{t, lyapunov_instant(m, s, c)};
    auto ramp = [t](double hh) { return [t, hh](double u) { return u - t + hh; }; };
    auto one = [](double) { return 1.0; };
    p.terms.v3 = w.r_m * series.integral(t - c.h_m, t, qd_m, ramp(c.h_m)) +
                 w.r_s * series.integral(t - c.h_s, t, qd_s, ramp(c.h_s));
    p.terms.v4 = c.nu_m * series.integral(t - tm, t, qd_m, one) +
                 c.nu_s * series.integral(t - ts, t, qd_s, one);
    out.push_back(p);
  }
  if (out.empty()) throw std::invalid_argument("log is shorter than the maximum delay");
  return out;
}

std::string_view to_string(ScenarioKind k) {
  return k == ScenarioKind::kFreeMotion ? "A" : "B";
}

std::string_view to_string(ControllerMode m) {
  return m == ControllerMode::kComposite ? "composite" : "classical";
}

std::string_view to_string(PredictionSource p) {
  return p == PredictionSource::kFiltered ? "filtered" : "measured";
}

}  // namespace teleop
