#pragma once

#include <string>
#include <vector>

namespace mbrl {

// Element i is the mean of the up-to-w most recent values ending at i.
std::vector<double> sliding_window(const std::vector<double>& xs, int w);

struct ScorePoint {
  long timestep = 0;
  double episode_return = 0.0;
};

struct SeedSeries {
  int seed = 0;
  bool failed = false;
  std::string error;
  std::vector<ScorePoint> points;
};

struct ExperimentRecord {
  std::string fingerprint;
  std::string env;
  std::string algo;
  std::vector<SeedSeries> seeds;
  double wall_seconds = 0.0;  // reported in a sidecar, never fingerprinted
};

struct ScoreSummary {
  double mean = 0.0;
  double stddev = 0.0;  // population std
  int n_seeds = 0;
  int n_effective_seeds = 0;
  int n_points = 0;
  long window_steps = 0;
};

// Mean/std over all (seed, episode) returns with timestep in
// [end - window_steps, end], end = latest timestep over non-failed seeds.
// Throws if the window is empty.
ScoreSummary final_score(const ExperimentRecord& rec, long window_steps = 5000);

struct RankEntry {
  std::string env;
  std::string algo;
  double mean = 0.0;
};

struct RankRow {
  std::string algo;
  double mean_rank = 0.0;
  double median_rank = 0.0;
  int n_algos = 0;
};

// Per env: rank by mean descending, rank 1 best, ties share the average
// rank; algorithms missing an env get the worst rank (= number of algos).
// Rows come back in the order of `algos`.
std::vector<RankRow> rank_table(const std::vector<std::string>& envs,
                                const std::vector<std::string>& algos,
                                const std::vector<RankEntry>& cells);

std::string format_mean_std(double mean, double stddev);  // "167.4 ± 53.0"
std::string format_rank(const RankRow& row);              // "4.0 / 10"

}  // namespace mbrl
