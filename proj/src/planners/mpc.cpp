#include "mbrl/planners/mpc.hpp"

#include <algorithm>

#include "mbrl/core/streams.hpp"

namespace mbrl {

namespace {

Mat shift_left(const Mat& m) {
  Mat out(m.rows(), m.cols());
  out.leftCols(m.cols() - 1) = m.rightCols(m.cols() - 1);
  out.col(m.cols() - 1).setZero();
  return out;
}

}  // namespace

RsPlanner::RsPlanner(const RolloutBackend& backend, RsConfig cfg)
    : backend_(backend), cfg_(cfg) {}

Vec RsPlanner::act(const Vec& obs, RngStream rng) {
  return plan_rs(backend_, obs, cfg_, rng).actions.col(0);
}

CemPlanner::CemPlanner(const RolloutBackend& backend, CemConfig cfg)
    : backend_(backend), cfg_(cfg) {}

Vec CemPlanner::act(const Vec& obs, RngStream rng) {
  const Mat warm = last_mean_.size() > 0 ? shift_left(last_mean_) : Mat();
  CemResult res = plan_cem(backend_, obs, cfg_, rng, warm);
  last_mean_ = res.mean;
  last_incumbent_value_ = res.incumbent_value;
  return last_mean_.col(0);
}

IlqgPlanner::IlqgPlanner(const Environment& env, IlqgConfig cfg)
    : env_(env), cfg_(cfg) {}

Vec IlqgPlanner::act(const Vec& obs, RngStream rng) {
  const Mat warm = last_actions_.size() > 0 ? shift_left(last_actions_) : Mat();
  IlqgResult res = plan_ilqg(env_, obs, cfg_, warm, rng);
  last_actions_ = res.actions;
  return last_actions_.col(0);
}

EpisodeStats mpc_episode(const Environment& env, Planner& planner,
                         const EpisodeOptions& opt, RngStream episode_rng,
                         TransitionDataset* record) {
  planner.reset();
  EpisodeExecutor exec(env, opt.noise, opt.scheme.stop_on_termination());
  exec.reset(episode_rng);
  if (record) record->begin_episode();

  const int limit = opt.max_steps > 0 ? std::min(opt.max_steps, env.spec().horizon)
                                      : env.spec().horizon;
  EpisodeStats stats;
  RngStream plan_rng = episode_rng.split(streams::kPlanStep);
  while (!exec.done() && stats.steps < limit) {
    const Vec obs = exec.observation();
    const Vec action = planner.act(obs, plan_rng.split(stats.steps));
    const EpisodeExecutor::Out out = exec.step(action);
    if (record) {
      record->add({obs, action, exec.observation(), out.reward, out.terminated});
    }
    stats.episode_return += out.reward;
    stats.terminated = out.terminated;
    ++stats.steps;
  }

  if (opt.scheme.scheme == 'E' && stats.terminated && record &&
      opt.scheme.extra_steps > 0) {
    const EnvSpec& sp = env.spec();
    RngStream extra_rng = episode_rng.split(streams::kExtra);
    Vec state = exec.true_state();
    Vec observed = exec.observation();
    for (int i = 0; i < opt.scheme.extra_steps; ++i) {
      RngStream sr = extra_rng.split(i);
      Vec a(sp.act_dim);
      for (Eigen::Index d = 0; d < sp.act_dim; ++d) {
        a[d] = sp.act_low[d] + (sp.act_high[d] - sp.act_low[d]) * sr.uniform01();
      }
      NoisyStepOut out = noisy_step(env, state, a, opt.noise, sr);
      record->add({observed, a, out.observed_next, out.reward, out.terminated});
      state = out.true_next;
      observed = out.observed_next;
    }
  }
  return stats;
}

}  // namespace mbrl
