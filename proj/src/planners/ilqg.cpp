#include "mbrl/planners/ilqg.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>

#include <Eigen/Cholesky>

#include "mbrl/core/streams.hpp"

namespace mbrl {

namespace {

struct StepQuad {
  Mat fx, fu;
  Vec cx, cu;
  Mat cxx, cuu, cux;
};

double rollout(const Environment& env, const Vec& s0, const Mat& u, Mat& x) {
  const Eigen::Index h = u.cols();
  x.resize(s0.size(), h + 1);
  x.col(0) = s0;
  Vec next(s0.size());
  double cost = 0.0;
  for (Eigen::Index t = 0; t < h; ++t) {
    const Vec xt = x.col(t);
    const Vec ut = u.col(t);
    env.step(xt, ut, next);
    cost -= env.reward(xt, ut, next);
    x.col(t + 1) = next;
  }
  return cost;
}

void quadratize(const Environment& env, const Mat& x, const Mat& u, double eps,
                std::vector<StepQuad>& q) {
  const Eigen::Index d = x.rows();
  const Eigen::Index m = u.rows();
  const Eigen::Index h = u.cols();
  q.resize(h);
  Vec p(d), np(d), nm(d), gp_n(d), gm_n(d), gp_a(m), gm_a(m), gn(d), ga(m);
  for (Eigen::Index t = 0; t < h; ++t) {
    StepQuad& s = q[t];
    const Vec xt = x.col(t);
    const Vec ut = u.col(t);
    const Vec nt = x.col(t + 1);
    s.fx.resize(d, d);
    for (Eigen::Index i = 0; i < d; ++i) {
      p = xt;
      p[i] += eps;
      env.step(p, ut, np);
      p[i] -= 2.0 * eps;
      env.step(p, ut, nm);
      s.fx.col(i) = (np - nm) / (2.0 * eps);
    }
    s.fu.resize(d, m);
    Vec up(m);
    for (Eigen::Index i = 0; i < m; ++i) {
      up = ut;
      up[i] += eps;
      env.step(xt, up, np);
      up[i] -= 2.0 * eps;
      env.step(xt, up, nm);
      s.fu.col(i) = (np - nm) / (2.0 * eps);
    }
    env.reward_gradient(xt, ut, nt, gn, ga);
    s.cx = -s.fx.transpose() * gn;
    s.cu = -(ga + s.fu.transpose() * gn);
    // Hessian blocks of the reward in (act, next) by central differences of
    // the analytic gradient; Gauss-Newton drops second derivatives of f.
    Mat S(d, d), B(m, d), A(m, m);
    for (Eigen::Index j = 0; j < d; ++j) {
      p = nt;
      p[j] += eps;
      env.reward_gradient(xt, ut, p, gp_n, gp_a);
      p[j] -= 2.0 * eps;
      env.reward_gradient(xt, ut, p, gm_n, gm_a);
      S.col(j) = (gp_n - gm_n) / (2.0 * eps);
      B.col(j) = (gp_a - gm_a) / (2.0 * eps);
    }
    for (Eigen::Index j = 0; j < m; ++j) {
      up = ut;
      up[j] += eps;
      env.reward_gradient(xt, up, nt, gp_n, gp_a);
      up[j] -= 2.0 * eps;
      env.reward_gradient(xt, up, nt, gm_n, gm_a);
      A.col(j) = (gp_a - gm_a) / (2.0 * eps);
    }
    S = 0.5 * (S + S.transpose()).eval();
    A = 0.5 * (A + A.transpose()).eval();
    s.cxx = -(s.fx.transpose() * S * s.fx);
    s.cuu = -(A + B * s.fu + s.fu.transpose() * B.transpose() +
              s.fu.transpose() * S * s.fu);
    s.cux = -(B * s.fx + s.fu.transpose() * S * s.fx);
  }
}

bool backward_pass(const std::vector<StepQuad>& q, double mu, std::vector<Vec>& k,
                   std::vector<Mat>& K) {
  const Eigen::Index h = static_cast<Eigen::Index>(q.size());
  const Eigen::Index d = q[0].fx.rows();
  k.resize(h);
  K.resize(h);
  Vec vx = Vec::Zero(d);
  Mat vxx = Mat::Zero(d, d);
  const Mat reg = mu * Mat::Identity(d, d);
  for (Eigen::Index t = h - 1; t >= 0; --t) {
    const StepQuad& s = q[t];
    const Vec qx = s.cx + s.fx.transpose() * vx;
    const Vec qu = s.cu + s.fu.transpose() * vx;
    const Mat qxx = s.cxx + s.fx.transpose() * vxx * s.fx;
    const Mat vxx_reg = vxx + reg;
    const Mat quu = s.cuu + s.fu.transpose() * vxx_reg * s.fu;
    const Mat qux = s.cux + s.fu.transpose() * vxx_reg * s.fx;
    Eigen::LLT<Mat> llt(quu);
    if (llt.info() != Eigen::Success) return false;
    k[t] = -llt.solve(qu);
    K[t] = -llt.solve(qux);
    vx = qx + K[t].transpose() * quu * k[t] + K[t].transpose() * qu +
         qux.transpose() * k[t];
    vxx = qxx + K[t].transpose() * quu * K[t] + K[t].transpose() * qux +
          qux.transpose() * K[t];
    vxx = 0.5 * (vxx + vxx.transpose()).eval();
  }
  return true;
}

IlqgResult optimize(const Environment& env, const Vec& s0, const Mat& u0,
                    const IlqgConfig& cfg) {
  const EnvSpec& sp = env.spec();
  IlqgResult res;
  res.actions = u0;
  res.cost = rollout(env, s0, res.actions, res.states);
  double mu = cfg.mu_init;
  std::vector<StepQuad> q;
  Mat x_new;
  Mat u_new(u0.rows(), u0.cols());
  for (int update = 0; update < cfg.updates; ++update) {
    quadratize(env, res.states, res.actions, cfg.fd_eps, q);
    bool bp_ok = false;
    while (mu <= cfg.mu_max) {
      if (backward_pass(q, mu, res.k, res.K)) {
        bp_ok = true;
        break;
      }
      mu *= cfg.mu_up;
    }
    if (!bp_ok) break;
    bool accepted = false;
    double alpha = 1.0;
    for (int bt = 0; bt < cfg.backtracks; ++bt) {
      double cost = 0.0;
      x_new.resize(sp.obs_dim, res.actions.cols() + 1);
      x_new.col(0) = s0;
      Vec next(sp.obs_dim);
      for (Eigen::Index t = 0; t < res.actions.cols(); ++t) {
        Vec ut = res.actions.col(t) + alpha * res.k[t] +
                 res.K[t] * (x_new.col(t) - res.states.col(t));
        for (Eigen::Index i = 0; i < sp.act_dim; ++i) {
          ut[i] = std::clamp(ut[i], sp.act_low[i], sp.act_high[i]);
        }
        const Vec xt = x_new.col(t);
        env.step(xt, ut, next);
        cost -= env.reward(xt, ut, next);
        u_new.col(t) = ut;
        x_new.col(t + 1) = next;
      }
      if (cost < res.cost) {
        res.cost = cost;
        res.actions = u_new;
        res.states = x_new;
        accepted = true;
        break;
      }
      alpha *= 0.5;
    }
    if (accepted) {
      mu = std::max(cfg.mu_min, mu * cfg.mu_down);
    } else {
      mu *= cfg.mu_up;
      if (mu > cfg.mu_max) break;
    }
  }
  return res;
}

}  // namespace

IlqgResult plan_ilqg(const Environment& env, const Vec& s0, const IlqgConfig& cfg,
                     const Mat& warm_start, RngStream rng) {
  const EnvSpec& sp = env.spec();
  if (cfg.horizon < 2) throw std::invalid_argument("ilqg horizon must be >= 2");
  if (cfg.backtracks < 1) throw std::invalid_argument("ilqg backtracks must be >= 1");
  if (cfg.updates < 1) throw std::invalid_argument("ilqg updates must be >= 1");
  if (cfg.restarts < 1) throw std::invalid_argument("ilqg restarts must be >= 1");
  if (s0.size() != sp.obs_dim) throw std::invalid_argument("ilqg s0 dim mismatch");
  if (warm_start.size() > 0 &&
      (warm_start.rows() != sp.act_dim || warm_start.cols() != cfg.horizon)) {
    throw std::invalid_argument("ilqg warm start shape mismatch");
  }

  IlqgResult best;
  best.cost = std::numeric_limits<double>::infinity();
  RngStream restarts_rng = rng.split(streams::kRestart);
  for (int r = 0; r < cfg.restarts; ++r) {
    Mat u0;
    if (r == 0) {
      u0 = warm_start.size() > 0 ? warm_start : Mat::Zero(sp.act_dim, cfg.horizon);
    } else {
      RngStream rr = restarts_rng.split(r);
      u0.resize(sp.act_dim, cfg.horizon);
      for (int t = 0; t < cfg.horizon; ++t) {
        for (Eigen::Index d = 0; d < sp.act_dim; ++d) {
          u0(d, t) =
              sp.act_low[d] + (sp.act_high[d] - sp.act_low[d]) * rr.uniform01();
        }
      }
    }
    IlqgResult res = optimize(env, s0, u0, cfg);
    if (res.cost < best.cost) best = std::move(res);
  }
  return best;
}

}  // namespace mbrl
