#include "mbrl/envs/noise.hpp"

#include <stdexcept>

#include "mbrl/core/streams.hpp"

namespace mbrl {

NoisyStepOut noisy_step(const Environment& env, const Vec& true_state, const Vec& action,
                        const NoiseConfig& noise, RngStream& rng) {
  NoisyStepOut out;
  Vec executed = action;
  if (noise.sigma_a > 0.0) {
    for (Eigen::Index i = 0; i < executed.size(); ++i) {
      executed[i] += noise.sigma_a * rng.normal();
    }
  }
  out.executed_action = clamp_action(env.spec(), executed);
  env.step(true_state, out.executed_action, out.true_next);
  out.reward = env.reward(true_state, out.executed_action, out.true_next);
  out.terminated = env.terminated(out.true_next);
  out.observed_next = out.true_next;
  if (noise.sigma_o > 0.0) {
    for (Eigen::Index i = 0; i < out.observed_next.size(); ++i) {
      out.observed_next[i] += noise.sigma_o * rng.normal();
    }
  }
  return out;
}

EpisodeExecutor::EpisodeExecutor(const Environment& env, NoiseConfig noise,
                                 bool stop_on_termination)
    : env_(env), noise_(noise), stop_on_termination_(stop_on_termination) {}

const Vec& EpisodeExecutor::reset(RngStream& episode_rng) {
  noise_rng_ = episode_rng.split(streams::kNoise);
  RngStream reset_rng = episode_rng.split(streams::kReset);
  env_.reset(reset_rng, true_state_);
  observed_ = true_state_;
  steps_ = 0;
  done_ = false;
  return observed_;
}

EpisodeExecutor::Out EpisodeExecutor::step(const Vec& action) {
  if (done_) throw std::logic_error("EpisodeExecutor.step: episode already done");
  NoisyStepOut s = noisy_step(env_, true_state_, action, noise_, noise_rng_);
  true_state_ = s.true_next;
  observed_ = s.observed_next;
  ++steps_;
  Out out;
  out.reward = s.reward;
  out.terminated = s.terminated && stop_on_termination_;
  out.truncated = steps_ >= env_.spec().horizon;
  done_ = out.terminated || out.truncated;
  return out;
}

}  // namespace mbrl
