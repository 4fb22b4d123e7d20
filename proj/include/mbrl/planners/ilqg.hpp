#pragma once

#include <vector>

#include "mbrl/core/rng.hpp"
#include "mbrl/core/types.hpp"
#include "mbrl/envs/env.hpp"

namespace mbrl {

struct IlqgConfig {
  int horizon = 20;
  int updates = 10;
  int backtracks = 10;
  int restarts = 10;
  double fd_eps = 1e-5;
  double mu_init = 1e-6;
  double mu_min = 1e-9;
  double mu_max = 1e10;
  double mu_up = 10.0;
  double mu_down = 0.5;
};

struct IlqgResult {
  Mat actions;         // act_dim x horizon nominal sequence
  Mat states;          // obs_dim x (horizon + 1) nominal rollout
  std::vector<Vec> k;  // open-loop terms
  std::vector<Mat> K;  // feedback gains (act_dim x obs_dim)
  double cost = 0.0;   // negative total reward of the nominal
};

// Requires ground-truth dynamics: uses env.step for rollouts and finite
// differences, and env.reward_gradient for the cost quadratization.
IlqgResult plan_ilqg(const Environment& env, const Vec& s0, const IlqgConfig& cfg,
                     const Mat& warm_start, RngStream rng);

}  // namespace mbrl
