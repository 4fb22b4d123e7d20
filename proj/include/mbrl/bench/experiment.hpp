#pragma once

#include "mbrl/bench/config.hpp"
#include "mbrl/bench/metrics.hpp"
#include "mbrl/core/thread_pool.hpp"

namespace mbrl {

// Runs all seeds of one experiment. Ground-truth algorithms evaluate
// episodes directly; learned ones warm up with random-action episodes, then
// alternate retraining on all data with MPC data collection. A seed whose
// run throws is marked failed and keeps the others running. Results are
// identical for any worker count.
ExperimentRecord run_experiment(const ExperimentConfig& cfg, ThreadPool* pool = nullptr);

}  // namespace mbrl
