#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <stdexcept>

#include "mbrl/envs/constants.hpp"
#include "mbrl/envs/env.hpp"

namespace mbrl {

void Environment::check_dims(const Vec& obs, const Vec& act, const char* op) const {
  if (obs.size() != spec_.obs_dim) {
    throw std::invalid_argument(std::string(op) + ": obs dim " +
                                std::to_string(obs.size()) + " != " +
                                std::to_string(spec_.obs_dim) + " for env " + spec_.name);
  }
  if (act.size() != spec_.act_dim) {
    throw std::invalid_argument(std::string(op) + ": act dim " +
                                std::to_string(act.size()) + " != " +
                                std::to_string(spec_.act_dim) + " for env " + spec_.name);
  }
}

namespace {

constexpr double kPi = std::numbers::pi;

class ParamReader {
 public:
  explicit ParamReader(EnvParams params) : params_(std::move(params)) {}

  double take(const std::string& key, double dflt) {
    auto it = params_.find(key);
    if (it == params_.end()) return dflt;
    const double v = it->second;
    params_.erase(it);
    return v;
  }

  void finish(const std::string& env) const {
    if (!params_.empty()) {
      throw std::invalid_argument("unknown env param '" + params_.begin()->first +
                                  "' for " + env);
    }
  }

 private:
  EnvParams params_;
};

void bounds(EnvSpec& spec, double lo, double hi) {
  spec.act_low = Vec::Constant(spec.act_dim, lo);
  spec.act_high = Vec::Constant(spec.act_dim, hi);
}

void check_finite(const Vec& obs, const Vec& act, const char* op) {
  if (!obs.allFinite() || !act.allFinite()) {
    throw std::invalid_argument(std::string(op) + ": non-finite input");
  }
}

// Torque-limited pendulum. Gravity destabilizes theta = 0, so the
// reward-maximizing configuration theta = pi is the stable equilibrium and
// the task is to settle there and kill the velocity. Observation
// (cos th, sin th, thdot); the angle advances with the unclamped velocity,
// the stored velocity is clamped.
class PendulumEnv : public Environment {
 public:
  explicit PendulumEnv(EnvParams params) {
    ParamReader p(std::move(params));
    c_.g = p.take("g", c_.g);
    c_.m = p.take("m", c_.m);
    c_.l = p.take("l", c_.l);
    c_.dt = p.take("dt", c_.dt);
    c_.max_torque = p.take("max_torque", c_.max_torque);
    c_.max_speed = p.take("max_speed", c_.max_speed);
    c_.init_th_range = p.take("init_th_range", c_.init_th_range);
    c_.init_thdot_range = p.take("init_thdot_range", c_.init_thdot_range);
    p.finish("pendulum");
    spec_.name = "pendulum";
    spec_.obs_dim = 3;
    spec_.act_dim = 1;
    spec_.horizon = 200;
    bounds(spec_, -c_.max_torque, c_.max_torque);
  }

  void reset(RngStream& rng, Vec& obs) const override {
    const double th = rng.uniform(-c_.init_th_range, c_.init_th_range);
    const double thdot = rng.uniform(-c_.init_thdot_range, c_.init_thdot_range);
    obs.resize(3);
    obs << std::cos(th), std::sin(th), thdot;
  }

  void step(const Vec& obs, const Vec& act, Vec& next_obs) const override {
    check_dims(obs, act, "pendulum.step");
    check_finite(obs, act, "pendulum.step");
    const double u = std::clamp(act[0], -c_.max_torque, c_.max_torque);
    const double th = std::atan2(obs[1], obs[0]);
    const double acc = 1.5 * c_.g / c_.l * std::sin(th) +
                       3.0 / (c_.m * c_.l * c_.l) * u;
    const double thdot = obs[2] + acc * c_.dt;
    const double th_next = th + thdot * c_.dt;
    next_obs.resize(3);
    next_obs << std::cos(th_next), std::sin(th_next),
        std::clamp(thdot, -c_.max_speed, c_.max_speed);
  }

  double reward(const Vec& obs, const Vec& act, const Vec& next_obs) const override {
    check_dims(next_obs, act, "pendulum.reward");
    (void)obs;
    return -next_obs[0] - 0.1 * next_obs[1] - 0.1 * next_obs[2] * next_obs[2] -
           0.001 * act[0] * act[0];
  }

  void reward_gradient(const Vec& obs, const Vec& act, const Vec& next_obs,
                       Vec& dr_dnext, Vec& dr_dact) const override {
    check_dims(next_obs, act, "pendulum.reward_gradient");
    (void)obs;
    dr_dnext.resize(3);
    dr_dnext << -1.0, -0.1, -0.2 * next_obs[2];
    dr_dact.resize(1);
    dr_dact << -0.002 * act[0];
  }

 private:
  PendulumConstants c_;
};

// Cart-pole with a continuous force in [-1, 1] (scaled by force_mag); the
// discrete param maps the action to its sign first. Observation
// (x, xdot, th, thdot); explicit Euler. No termination in the base task.
class CartpoleEnv : public Environment {
 public:
  CartpoleEnv(EnvParams params, bool early_termination) : et_(early_termination) {
    ParamReader p(std::move(params));
    c_.gravity = p.take("gravity", c_.gravity);
    c_.masscart = p.take("masscart", c_.masscart);
    c_.masspole = p.take("masspole", c_.masspole);
    c_.length = p.take("length", c_.length);
    c_.force_mag = p.take("force_mag", c_.force_mag);
    c_.dt = p.take("dt", c_.dt);
    c_.discrete = p.take("discrete", c_.discrete ? 1.0 : 0.0) != 0.0;
    if (et_) {
      // Wider default initial tilt so keeping margin to the threshold matters.
      c_.init_theta = 0.25;
      c_.init_thetadot = 0.8;
    }
    c_.init_x = p.take("init_x", c_.init_x);
    c_.init_xdot = p.take("init_xdot", c_.init_xdot);
    c_.init_theta = p.take("init_theta", c_.init_theta);
    c_.init_thetadot = p.take("init_thetadot", c_.init_thetadot);
    c_.theta_threshold = p.take("theta_threshold", c_.theta_threshold);
    c_.x_threshold = p.take("x_threshold", c_.x_threshold);
    p.finish(et_ ? "cartpole_et" : "cartpole");
    spec_.name = et_ ? "cartpole_et" : "cartpole";
    spec_.obs_dim = 4;
    spec_.act_dim = 1;
    spec_.horizon = 200;
    spec_.has_termination = et_;
    bounds(spec_, -1.0, 1.0);
  }

  void reset(RngStream& rng, Vec& obs) const override {
    obs.resize(4);
    obs << rng.uniform(-c_.init_x, c_.init_x), rng.uniform(-c_.init_xdot, c_.init_xdot),
        rng.uniform(-c_.init_theta, c_.init_theta),
        rng.uniform(-c_.init_thetadot, c_.init_thetadot);
  }

  void step(const Vec& obs, const Vec& act, Vec& next_obs) const override {
    check_dims(obs, act, "cartpole.step");
    check_finite(obs, act, "cartpole.step");
    const double x = obs[0], xdot = obs[1], th = obs[2], thdot = obs[3];
    const double u = std::clamp(act[0], -1.0, 1.0);
    const double a = c_.discrete ? (u >= 0.0 ? 1.0 : -1.0) : u;
    const double force = c_.force_mag * a;
    const double total_mass = c_.masscart + c_.masspole;
    const double pml = c_.masspole * c_.length;
    const double costh = std::cos(th), sinth = std::sin(th);
    const double temp = (force + pml * thdot * thdot * sinth) / total_mass;
    const double thacc = (c_.gravity * sinth - costh * temp) /
                         (c_.length * (4.0 / 3.0 - c_.masspole * costh * costh / total_mass));
    const double xacc = temp - pml * thacc * costh / total_mass;
    next_obs.resize(4);
    next_obs << x + c_.dt * xdot, xdot + c_.dt * xacc, th + c_.dt * thdot,
        thdot + c_.dt * thacc;
  }

  double reward(const Vec& obs, const Vec& act, const Vec& next_obs) const override {
    check_dims(next_obs, act, "cartpole.reward");
    (void)obs;
    return std::cos(next_obs[2]) - 0.01 * next_obs[0] * next_obs[0];
  }

  void reward_gradient(const Vec& obs, const Vec& act, const Vec& next_obs,
                       Vec& dr_dnext, Vec& dr_dact) const override {
    check_dims(next_obs, act, "cartpole.reward_gradient");
    (void)obs;
    dr_dnext = Vec::Zero(4);
    dr_dnext[0] = -0.02 * next_obs[0];
    dr_dnext[2] = -std::sin(next_obs[2]);
    dr_dact = Vec::Zero(1);
  }

  bool terminated(const Vec& obs) const override {
    if (!et_) return false;
    return std::abs(obs[2]) > c_.theta_threshold || std::abs(obs[0]) > c_.x_threshold;
  }

 private:
  CartpoleConstants c_;
  bool et_;
};

// Two-link underactuated acrobot (torque on the elbow), angles measured from
// hanging. Observation (cos th1, sin th1, cos th2, sin th2, th1dot, th2dot);
// one RK4 step of dt per transition, then velocity clamping.
class AcrobotEnv : public Environment {
 public:
  explicit AcrobotEnv(EnvParams params) {
    ParamReader p(std::move(params));
    c_.m1 = p.take("m1", c_.m1);
    c_.m2 = p.take("m2", c_.m2);
    c_.l1 = p.take("l1", c_.l1);
    c_.lc1 = p.take("lc1", c_.lc1);
    c_.lc2 = p.take("lc2", c_.lc2);
    c_.i1 = p.take("i1", c_.i1);
    c_.i2 = p.take("i2", c_.i2);
    c_.g = p.take("g", c_.g);
    c_.dt = p.take("dt", c_.dt);
    c_.max_vel1 = p.take("max_vel1", c_.max_vel1);
    c_.max_vel2 = p.take("max_vel2", c_.max_vel2);
    c_.max_torque = p.take("max_torque", c_.max_torque);
    c_.init_range = p.take("init_range", c_.init_range);
    p.finish("acrobot");
    spec_.name = "acrobot";
    spec_.obs_dim = 6;
    spec_.act_dim = 1;
    spec_.horizon = 200;
    bounds(spec_, -c_.max_torque, c_.max_torque);
  }

  void reset(RngStream& rng, Vec& obs) const override {
    const double r = c_.init_range;
    const double th1 = rng.uniform(-r, r);
    const double th2 = rng.uniform(-r, r);
    const double w1 = rng.uniform(-r, r);
    const double w2 = rng.uniform(-r, r);
    obs.resize(6);
    obs << std::cos(th1), std::sin(th1), std::cos(th2), std::sin(th2), w1, w2;
  }

  void step(const Vec& obs, const Vec& act, Vec& next_obs) const override {
    check_dims(obs, act, "acrobot.step");
    check_finite(obs, act, "acrobot.step");
    Eigen::Vector4d s(std::atan2(obs[1], obs[0]), std::atan2(obs[3], obs[2]), obs[4], obs[5]);
    const double tau = std::clamp(act[0], -c_.max_torque, c_.max_torque);
    auto deriv = [&](const Eigen::Vector4d& y) {
      const double th1 = y[0], th2 = y[1], w1 = y[2], w2 = y[3];
      const double d1 = c_.m1 * c_.lc1 * c_.lc1 +
                        c_.m2 * (c_.l1 * c_.l1 + c_.lc2 * c_.lc2 +
                                 2.0 * c_.l1 * c_.lc2 * std::cos(th2)) +
                        c_.i1 + c_.i2;
      const double d2 = c_.m2 * (c_.lc2 * c_.lc2 + c_.l1 * c_.lc2 * std::cos(th2)) + c_.i2;
      const double phi2 = c_.m2 * c_.lc2 * c_.g * std::cos(th1 + th2 - kPi / 2.0);
      const double phi1 = -c_.m2 * c_.l1 * c_.lc2 * w2 * w2 * std::sin(th2) -
                          2.0 * c_.m2 * c_.l1 * c_.lc2 * w2 * w1 * std::sin(th2) +
                          (c_.m1 * c_.lc1 + c_.m2 * c_.l1) * c_.g * std::cos(th1 - kPi / 2.0) +
                          phi2;
      const double acc2 =
          (tau + d2 / d1 * phi1 - c_.m2 * c_.l1 * c_.lc2 * w1 * w1 * std::sin(th2) - phi2) /
          (c_.m2 * c_.lc2 * c_.lc2 + c_.i2 - d2 * d2 / d1);
      const double acc1 = -(d2 * acc2 + phi1) / d1;
      return Eigen::Vector4d(w1, w2, acc1, acc2);
    };
    const Eigen::Vector4d k1 = deriv(s);
    const Eigen::Vector4d k2 = deriv(s + 0.5 * c_.dt * k1);
    const Eigen::Vector4d k3 = deriv(s + 0.5 * c_.dt * k2);
    const Eigen::Vector4d k4 = deriv(s + c_.dt * k3);
    Eigen::Vector4d out = s + c_.dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    out[2] = std::clamp(out[2], -c_.max_vel1, c_.max_vel1);
    out[3] = std::clamp(out[3], -c_.max_vel2, c_.max_vel2);
    next_obs.resize(6);
    next_obs << std::cos(out[0]), std::sin(out[0]), std::cos(out[1]), std::sin(out[1]),
        out[2], out[3];
  }

  double reward(const Vec& obs, const Vec& act, const Vec& next_obs) const override {
    check_dims(next_obs, act, "acrobot.reward");
    (void)obs;
    // -cos th1 - cos(th1 + th2) written on the cos/sin observation.
    return -next_obs[0] - (next_obs[0] * next_obs[2] - next_obs[1] * next_obs[3]);
  }

  void reward_gradient(const Vec& obs, const Vec& act, const Vec& next_obs,
                       Vec& dr_dnext, Vec& dr_dact) const override {
    check_dims(next_obs, act, "acrobot.reward_gradient");
    (void)obs;
    dr_dnext = Vec::Zero(6);
    dr_dnext[0] = -1.0 - next_obs[2];
    dr_dnext[1] = next_obs[3];
    dr_dnext[2] = -next_obs[0];
    dr_dnext[3] = next_obs[1];
    dr_dact = Vec::Zero(1);
  }

 private:
  AcrobotConstants c_;
};

// Continuous-force mountain car with the standard position/velocity update.
// Fixed 200-step horizon, no success termination; reward is the position.
class MountaincarEnv : public Environment {
 public:
  explicit MountaincarEnv(EnvParams params) {
    ParamReader p(std::move(params));
    c_.power = p.take("power", c_.power);
    c_.gravity_scale = p.take("gravity_scale", c_.gravity_scale);
    c_.min_position = p.take("min_position", c_.min_position);
    c_.max_position = p.take("max_position", c_.max_position);
    c_.max_speed = p.take("max_speed", c_.max_speed);
    c_.init_low = p.take("init_low", c_.init_low);
    c_.init_high = p.take("init_high", c_.init_high);
    p.finish("mountaincar");
    spec_.name = "mountaincar";
    spec_.obs_dim = 2;
    spec_.act_dim = 1;
    spec_.horizon = 200;
    bounds(spec_, -1.0, 1.0);
  }

  void reset(RngStream& rng, Vec& obs) const override {
    obs.resize(2);
    obs << rng.uniform(c_.init_low, c_.init_high), 0.0;
  }

  void step(const Vec& obs, const Vec& act, Vec& next_obs) const override {
    check_dims(obs, act, "mountaincar.step");
    check_finite(obs, act, "mountaincar.step");
    const double u = std::clamp(act[0], -1.0, 1.0);
    double v = obs[1] + c_.power * u - c_.gravity_scale * std::cos(3.0 * obs[0]);
    v = std::clamp(v, -c_.max_speed, c_.max_speed);
    double pos = std::clamp(obs[0] + v, c_.min_position, c_.max_position);
    if (pos <= c_.min_position && v < 0.0) v = 0.0;
    next_obs.resize(2);
    next_obs << pos, v;
  }

  double reward(const Vec& obs, const Vec& act, const Vec& next_obs) const override {
    check_dims(next_obs, act, "mountaincar.reward");
    (void)obs;
    return next_obs[0];
  }

  void reward_gradient(const Vec& obs, const Vec& act, const Vec& next_obs,
                       Vec& dr_dnext, Vec& dr_dact) const override {
    check_dims(next_obs, act, "mountaincar.reward_gradient");
    (void)obs;
    dr_dnext = Vec::Zero(2);
    dr_dnext[0] = 1.0;
    dr_dact = Vec::Zero(1);
  }

 private:
  MountaincarConstants c_;
};

// Two-link planar reacher with torque-driven joints (viscous damping, no
// gravity), integrated with one RK4 step per transition. The target is fixed
// for the episode and embedded in the observation:
// (cos th1, cos th2, sin th1, sin th2, tx, ty, w1, w2, fx-tx, fy-ty, 0).
class Reacher2dEnv : public Environment {
 public:
  explicit Reacher2dEnv(EnvParams params) {
    ParamReader p(std::move(params));
    c_.l1 = p.take("l1", c_.l1);
    c_.l2 = p.take("l2", c_.l2);
    c_.dt = p.take("dt", c_.dt);
    c_.torque_scale = p.take("torque_scale", c_.torque_scale);
    c_.damping = p.take("damping", c_.damping);
    c_.max_torque = p.take("max_torque", c_.max_torque);
    c_.target_radius = p.take("target_radius", c_.target_radius);
    c_.init_angle = p.take("init_angle", c_.init_angle);
    c_.init_vel = p.take("init_vel", c_.init_vel);
    p.finish("reacher2d");
    spec_.name = "reacher2d";
    spec_.obs_dim = 11;
    spec_.act_dim = 2;
    spec_.horizon = 50;
    bounds(spec_, -c_.max_torque, c_.max_torque);
  }

  void reset(RngStream& rng, Vec& obs) const override {
    const double th1 = rng.uniform(-c_.init_angle, c_.init_angle);
    const double th2 = rng.uniform(-c_.init_angle, c_.init_angle);
    const double w1 = rng.uniform(-c_.init_vel, c_.init_vel);
    const double w2 = rng.uniform(-c_.init_vel, c_.init_vel);
    // Uniform over the reachable disk.
    const double ang = rng.uniform(0.0, 2.0 * kPi);
    const double rad = c_.target_radius * std::sqrt(rng.uniform01());
    pack(th1, th2, w1, w2, rad * std::cos(ang), rad * std::sin(ang), obs);
  }

  void step(const Vec& obs, const Vec& act, Vec& next_obs) const override {
    check_dims(obs, act, "reacher2d.step");
    check_finite(obs, act, "reacher2d.step");
    Eigen::Vector4d s(std::atan2(obs[2], obs[0]), std::atan2(obs[3], obs[1]), obs[6], obs[7]);
    const double u0 = std::clamp(act[0], -c_.max_torque, c_.max_torque);
    const double u1 = std::clamp(act[1], -c_.max_torque, c_.max_torque);
    auto deriv = [&](const Eigen::Vector4d& y) {
      return Eigen::Vector4d(y[2], y[3], c_.torque_scale * u0 - c_.damping * y[2],
                             c_.torque_scale * u1 - c_.damping * y[3]);
    };
    const Eigen::Vector4d k1 = deriv(s);
    const Eigen::Vector4d k2 = deriv(s + 0.5 * c_.dt * k1);
    const Eigen::Vector4d k3 = deriv(s + 0.5 * c_.dt * k2);
    const Eigen::Vector4d k4 = deriv(s + c_.dt * k3);
    const Eigen::Vector4d out = s + c_.dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    pack(out[0], out[1], out[2], out[3], obs[4], obs[5], next_obs);
  }

  double reward(const Vec& obs, const Vec& act, const Vec& next_obs) const override {
    check_dims(next_obs, act, "reacher2d.reward");
    (void)obs;
    const double dist = next_obs.segment<3>(8).norm();
    return -dist - act.squaredNorm();
  }

  void reward_gradient(const Vec& obs, const Vec& act, const Vec& next_obs,
                       Vec& dr_dnext, Vec& dr_dact) const override {
    check_dims(next_obs, act, "reacher2d.reward_gradient");
    (void)obs;
    dr_dnext = Vec::Zero(11);
    const double dist = next_obs.segment<3>(8).norm();
    if (dist > 1e-12) {
      dr_dnext.segment<3>(8) = -next_obs.segment<3>(8) / dist;
    }
    dr_dact = -2.0 * act;
  }

 private:
  void pack(double th1, double th2, double w1, double w2, double tx, double ty,
            Vec& obs) const {
    const double fx = c_.l1 * std::cos(th1) + c_.l2 * std::cos(th1 + th2);
    const double fy = c_.l1 * std::sin(th1) + c_.l2 * std::sin(th1 + th2);
    obs.resize(11);
    obs << std::cos(th1), std::cos(th2), std::sin(th1), std::sin(th2), tx, ty, w1, w2,
        fx - tx, fy - ty, 0.0;
  }

  Reacher2dConstants c_;
};

}  // namespace

std::unique_ptr<Environment> make_env(const std::string& name, const EnvParams& params) {
  if (name == "pendulum") return std::make_unique<PendulumEnv>(params);
  if (name == "cartpole") return std::make_unique<CartpoleEnv>(params, false);
  if (name == "cartpole_et") return std::make_unique<CartpoleEnv>(params, true);
  if (name == "acrobot") return std::make_unique<AcrobotEnv>(params);
  if (name == "mountaincar") return std::make_unique<MountaincarEnv>(params);
  if (name == "reacher2d") return std::make_unique<Reacher2dEnv>(params);
  std::string msg = "unknown env '" + name + "'; available:";
  for (const auto& n : env_names()) msg += " " + n;
  throw std::invalid_argument(msg);
}

const std::vector<std::string>& env_names() {
  static const std::vector<std::string> names = {
      "pendulum", "cartpole", "cartpole_et", "acrobot", "mountaincar", "reacher2d"};
  return names;
}

}  // namespace mbrl
