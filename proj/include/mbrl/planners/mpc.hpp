#pragma once

#include "mbrl/core/rng.hpp"
#include "mbrl/core/types.hpp"
#include "mbrl/dynamics/dataset.hpp"
#include "mbrl/envs/env.hpp"
#include "mbrl/envs/noise.hpp"
#include "mbrl/planners/backend.hpp"
#include "mbrl/planners/ilqg.hpp"
#include "mbrl/planners/shooting.hpp"

namespace mbrl {

// Produces the next action to execute. Implementations hold per-episode
// warm-start state only; reset() clears it at episode start.
class Planner {
 public:
  virtual ~Planner() = default;
  virtual Vec act(const Vec& obs, RngStream rng) = 0;
  virtual void reset() {}
  virtual int horizon() const = 0;
};

class RsPlanner : public Planner {
 public:
  RsPlanner(const RolloutBackend& backend, RsConfig cfg);
  Vec act(const Vec& obs, RngStream rng) override;
  int horizon() const override { return cfg_.horizon; }

 private:
  const RolloutBackend& backend_;
  RsConfig cfg_;
};

class CemPlanner : public Planner {
 public:
  CemPlanner(const RolloutBackend& backend, CemConfig cfg);
  Vec act(const Vec& obs, RngStream rng) override;
  void reset() override { last_mean_.resize(0, 0); }
  int horizon() const override { return cfg_.horizon; }
  double last_incumbent_value() const { return last_incumbent_value_; }

 private:
  const RolloutBackend& backend_;
  CemConfig cfg_;
  Mat last_mean_;
  double last_incumbent_value_ = 0.0;
};

class IlqgPlanner : public Planner {
 public:
  IlqgPlanner(const Environment& env, IlqgConfig cfg);
  Vec act(const Vec& obs, RngStream rng) override;
  void reset() override { last_actions_.resize(0, 0); }
  int horizon() const override { return cfg_.horizon; }

 private:
  const Environment& env_;
  IlqgConfig cfg_;
  Mat last_actions_;
};

struct EpisodeOptions {
  int max_steps = 0;  // 0 uses the env spec horizon
  NoiseConfig noise;
  SchemeConfig scheme;
};

struct EpisodeStats {
  double episode_return = 0.0;
  int steps = 0;
  bool terminated = false;
};

// Runs one closed-loop episode: plan from the current observation, execute
// the first action, shift the solution as the next warm start. Scheme A
// disables stopping at termination; scheme E appends extra random-action
// transitions to `record` after a real termination (return unaffected).
EpisodeStats mpc_episode(const Environment& env, Planner& planner,
                         const EpisodeOptions& opt, RngStream episode_rng,
                         TransitionDataset* record = nullptr);

}  // namespace mbrl
