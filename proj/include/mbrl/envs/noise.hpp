#pragma once

#include "mbrl/core/rng.hpp"
#include "mbrl/core/types.hpp"
#include "mbrl/envs/env.hpp"

namespace mbrl {

struct NoiseConfig {
  double sigma_o = 0.0;  // observation noise std (added to the next observation)
  double sigma_a = 0.0;  // action noise std (added before clamping and execution)

  bool enabled() const { return sigma_o > 0.0 || sigma_a > 0.0; }
};

struct NoisyStepOut {
  Vec executed_action;  // clamp(action + eps_a)
  Vec true_next;        // env.step on the true state with the executed action
  Vec observed_next;    // true_next + eps_o
  double reward;        // from the true transition
  bool terminated;      // from the true next state
};

// Pure noisy transition. Draw order: action noise components, then
// observation noise components. Zero sigmas draw nothing and reproduce the
// plain step bit-exactly.
NoisyStepOut noisy_step(const Environment& env, const Vec& true_state, const Vec& action,
                        const NoiseConfig& noise, RngStream& rng);

// Owns episode state: true state, observed state, step count. The agent only
// ever sees observations; rewards and termination come from the true state.
// Noise draws use a dedicated split of the episode stream so enabling or
// disabling noise never perturbs planner streams.
class EpisodeExecutor {
 public:
  // stop_on_termination=false runs the env's termination-free variant of an
  // episode (scheme A); truncation at spec().horizon always applies.
  EpisodeExecutor(const Environment& env, NoiseConfig noise, bool stop_on_termination);

  const Vec& reset(RngStream& episode_rng);

  struct Out {
    double reward = 0.0;
    bool terminated = false;
    bool truncated = false;
  };
  Out step(const Vec& action);

  const Vec& observation() const { return observed_; }
  const Vec& true_state() const { return true_state_; }
  const Environment& env() const { return env_; }
  int steps() const { return steps_; }
  bool done() const { return done_; }

 private:
  const Environment& env_;
  NoiseConfig noise_;
  bool stop_on_termination_;
  RngStream noise_rng_{0};
  Vec true_state_;
  Vec observed_;
  int steps_ = 0;
  bool done_ = false;
};

}  // namespace mbrl
