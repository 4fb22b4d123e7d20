#pragma once

#include <string>
#include <utility>
#include <vector>

#include "mbrl/bench/config.hpp"
#include "mbrl/bench/experiment.hpp"

namespace mbrl {

struct HorizonResult {
  int horizon = 0;
  ScoreSummary score;
};

// Runs base once per horizon with everything else fixed; each run lands in
// out_dir/h<horizon>/ and an aggregate horizons.csv in out_dir.
std::vector<HorizonResult> horizon_sweep(ExperimentConfig base,
                                         const std::vector<int>& horizons,
                                         const std::string& out_dir,
                                         ThreadPool* pool = nullptr);

struct NoiseResult {
  double sigma_o = 0.0;
  double sigma_a = 0.0;
  ScoreSummary score;
  double delta_pct = 0.0;  // relative change of mean vs the noise-free baseline
  bool flagged = false;    // |delta_pct| > 10
};

// Always runs the noise-free baseline first. sigma_o/sigma_a >= 0 select a
// single extra cell; both negative runs the preset grid
// {(0.1,0), (0.01,0), (0,0.1), (0,0.03)}. Writes noise.csv in out_dir.
std::vector<NoiseResult> noise_sweep(ExperimentConfig base, double sigma_o,
                                     double sigma_a, const std::string& out_dir,
                                     ThreadPool* pool = nullptr);

// Grid file lines: `section.key = v1, v2, ...`.
using GridSpec = std::vector<std::pair<std::string, std::vector<std::string>>>;
GridSpec parse_grid_file(const std::string& path);

struct GridCell {
  ExperimentConfig cfg;
  ScoreSummary score;
  double wall_seconds = 0.0;
  std::string dir;
};

// Cartesian product of the grid over base (last key varies fastest). Every
// cell is run with all seeds and persisted under out_dir/cell<i>/; best cell
// has the highest mean, ties broken by lower wall-clock. Writes grid.csv.
std::vector<GridCell> grid_search(const ExperimentConfig& base, const GridSpec& grid,
                                  const std::string& out_dir, std::size_t* best_index,
                                  ThreadPool* pool = nullptr);

}  // namespace mbrl
