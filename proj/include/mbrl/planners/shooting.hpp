#pragma once

#include <vector>

#include "mbrl/core/rng.hpp"
#include "mbrl/core/types.hpp"
#include "mbrl/planners/backend.hpp"

namespace mbrl {

struct RsConfig {
  int population = 1000;
  int horizon = 30;
};

struct CemConfig {
  int population = 500;
  int elites = 50;
  int iterations = 5;
  double alpha = 0.9;  // weight on the new elite statistics
  double init_std_frac = 0.25;
  double std_floor = 1e-6;
  int horizon = 30;
};

struct RsResult {
  Mat actions;  // act_dim x horizon
  double value = 0.0;
  int index = 0;
};

struct CemResult {
  Mat mean;       // act_dim x horizon, executed sequence
  Mat incumbent;  // best-ever sampled candidate
  double incumbent_value = 0.0;
  std::vector<double> iter_best;  // incumbent value after each iteration
};

RsResult plan_rs(const RolloutBackend& backend, const Vec& s0, const RsConfig& cfg,
                 RngStream rng);

// warm_mean may be empty (0x0); it seeds the sampling mean otherwise.
CemResult plan_cem(const RolloutBackend& backend, const Vec& s0, const CemConfig& cfg,
                   RngStream rng, const Mat& warm_mean = Mat());

}  // namespace mbrl
