#pragma once

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "mbrl/core/rng.hpp"
#include "mbrl/core/types.hpp"
#include "mbrl/envs/env.hpp"

namespace mbrl::test {

// Linear dynamics s' = A s + B a with quadratic cost; reward
// -(s'^T Q s' + a^T R a). Unbounded actions, no termination. The exact
// optimum is given by the discrete Riccati recursion below.
class LinearEnv : public Environment {
 public:
  LinearEnv(Mat A, Mat B, Mat Q, Mat R, Vec s0, int horizon)
      : A_(std::move(A)), B_(std::move(B)), Q_(std::move(Q)), R_(std::move(R)),
        s0_(std::move(s0)) {
    spec_.name = "linear";
    spec_.obs_dim = static_cast<int>(A_.rows());
    spec_.act_dim = static_cast<int>(B_.cols());
    spec_.horizon = horizon;
    spec_.act_low = Vec::Constant(spec_.act_dim, -1e9);
    spec_.act_high = Vec::Constant(spec_.act_dim, 1e9);
  }

  void reset(RngStream&, Vec& obs) const override { obs = s0_; }

  void step(const Vec& obs, const Vec& act, Vec& next_obs) const override {
    next_obs = A_ * obs + B_ * act;
  }

  double reward(const Vec&, const Vec& act, const Vec& next_obs) const override {
    return -(next_obs.dot(Q_ * next_obs) + act.dot(R_ * act));
  }

  void reward_gradient(const Vec&, const Vec& act, const Vec& next_obs,
                       Vec& dr_dnext, Vec& dr_dact) const override {
    dr_dnext = -2.0 * (Q_ * next_obs);
    dr_dact = -2.0 * (R_ * act);
  }

  const Mat& A() const { return A_; }
  const Mat& B() const { return B_; }

 private:
  Mat A_, B_, Q_, R_;
  Vec s0_;
};

// Optimal total cost of the finite-horizon problem solved by LinearEnv:
// min sum_t s_{t+1}^T Q s_{t+1} + a_t^T R a_t over T steps from s0.
inline double riccati_cost(const Mat& A, const Mat& B, const Mat& Q, const Mat& R,
                           int horizon, const Vec& s0) {
  Mat P = Mat::Zero(A.rows(), A.cols());
  for (int t = horizon - 1; t >= 0; --t) {
    const Mat M = Q + P;
    const Mat BtMB = R + B.transpose() * M * B;
    const Mat K = BtMB.ldlt().solve(B.transpose() * M * A);
    P = A.transpose() * M * A - A.transpose() * M * B * K;
    P = 0.5 * (P + P.transpose());
  }
  return s0.dot(P * s0);
}

// Random controllable-ish LQR instance: A scaled near unit spectral radius,
// full-rank B, PD Q and R.
struct LqrInstance {
  Mat A, B, Q, R;
  Vec s0;
};

inline LqrInstance random_lqr(RngStream& rng, int state_dim, int act_dim) {
  LqrInstance inst;
  auto fill = [&](Eigen::Index r, Eigen::Index c) {
    Mat m(r, c);
    for (Eigen::Index i = 0; i < r; ++i)
      for (Eigen::Index j = 0; j < c; ++j) m(i, j) = rng.normal();
    return m;
  };
  inst.A = fill(state_dim, state_dim);
  const double radius = inst.A.eigenvalues().cwiseAbs().maxCoeff();
  inst.A /= std::max(1.0, radius / 1.05);
  inst.B = fill(state_dim, act_dim);
  Mat q = fill(state_dim, state_dim);
  inst.Q = q * q.transpose() + 0.1 * Mat::Identity(state_dim, state_dim);
  Mat r = fill(act_dim, act_dim);
  inst.R = r * r.transpose() + 0.1 * Mat::Identity(act_dim, act_dim);
  inst.s0 = fill(state_dim, 1);
  return inst;
}

// Central finite differences of env.reward with respect to next_obs and act.
inline void fd_reward_gradient(const Environment& env, const Vec& s, const Vec& a,
                               const Vec& sp, Vec& gn, Vec& ga, double h = 1e-6) {
  gn.resize(sp.size());
  for (Eigen::Index i = 0; i < sp.size(); ++i) {
    Vec hi = sp, lo = sp;
    hi[i] += h;
    lo[i] -= h;
    gn[i] = (env.reward(s, a, hi) - env.reward(s, a, lo)) / (2.0 * h);
  }
  ga.resize(a.size());
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    Vec hi = a, lo = a;
    hi[i] += h;
    lo[i] -= h;
    ga[i] = (env.reward(s, hi, sp) - env.reward(s, lo, sp)) / (2.0 * h);
  }
}

inline double rel_err(const Vec& got, const Vec& want) {
  return (got - want).norm() / std::max(1.0, want.norm());
}

// Fresh temp directory under TMPDIR for report/sweep outputs.
inline std::string temp_dir(const std::string& tag) {
  std::string tmpl = "/tmp/mbrl_" + tag + "_XXXXXX";
  std::vector<char> buf(tmpl.begin(), tmpl.end());
  buf.push_back('\0');
  if (mkdtemp(buf.data()) == nullptr) throw std::runtime_error("mkdtemp failed");
  return std::string(buf.data());
}

}  // namespace mbrl::test
