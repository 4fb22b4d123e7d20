#include "mbrl/bench/sweeps.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <stdexcept>

#include "mbrl/bench/report.hpp"

namespace mbrl {

namespace {

const std::vector<std::string> kAllFormats = {"csv", "json", "md", "curves"};

std::string fmt_g(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%g", v);
  return buf;
}

std::ofstream open_out(const std::string& path) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("sweep: cannot write '" + path + "'");
  return f;
}

ScoreSummary run_cell(ExperimentConfig cfg, const std::string& dir, ThreadPool* pool,
                      double* wall = nullptr) {
  cfg.out_dir = dir;
  const ExperimentRecord rec = run_experiment(cfg, pool);
  const ScoreSummary score = final_score(rec);
  emit_report(rec, score, dir, kAllFormats);
  write_timing(rec, dir);
  std::ofstream f = open_out(dir + "/config.ini");
  f << cfg.canonical_string();
  if (wall) *wall = rec.wall_seconds;
  return score;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

}  // namespace

std::vector<HorizonResult> horizon_sweep(ExperimentConfig base,
                                         const std::vector<int>& horizons,
                                         const std::string& out_dir,
                                         ThreadPool* pool) {
  if (horizons.empty()) throw std::invalid_argument("horizon_sweep: no horizons");
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  std::vector<HorizonResult> results;
  for (const int h : horizons) {
    if (h < 1) throw std::invalid_argument("horizon_sweep: horizon must be >= 1");
    ExperimentConfig cfg = base;
    cfg.rs.horizon = h;
    cfg.cem.horizon = h;
    cfg.ilqg.horizon = h;
    HorizonResult r;
    r.horizon = h;
    r.score = run_cell(cfg, out_dir + "/h" + std::to_string(h), pool);
    results.push_back(r);
  }
  std::ofstream f = open_out(out_dir + "/horizons.csv");
  f << "horizon,mean,std,n_points\n";
  for (const HorizonResult& r : results) {
    char buf[120];
    std::snprintf(buf, sizeof(buf), "%d,%.17g,%.17g,%d\n", r.horizon, r.score.mean,
                  r.score.stddev, r.score.n_points);
    f << buf;
  }
  return results;
}

std::vector<NoiseResult> noise_sweep(ExperimentConfig base, double sigma_o,
                                     double sigma_a, const std::string& out_dir,
                                     ThreadPool* pool) {
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  std::vector<std::pair<double, double>> cells;
  cells.emplace_back(0.0, 0.0);
  if (sigma_o >= 0.0 || sigma_a >= 0.0) {
    cells.emplace_back(std::max(sigma_o, 0.0), std::max(sigma_a, 0.0));
  } else {
    cells.emplace_back(0.1, 0.0);
    cells.emplace_back(0.01, 0.0);
    cells.emplace_back(0.0, 0.1);
    cells.emplace_back(0.0, 0.03);
  }
  std::vector<NoiseResult> results;
  for (const auto& [so, sa] : cells) {
    ExperimentConfig cfg = base;
    cfg.sigma_o = so;
    cfg.sigma_a = sa;
    NoiseResult r;
    r.sigma_o = so;
    r.sigma_a = sa;
    r.score = run_cell(cfg, out_dir + "/so" + fmt_g(so) + "_sa" + fmt_g(sa), pool);
    results.push_back(r);
  }
  const double base_mean = results[0].score.mean;
  const double denom = std::max(std::abs(base_mean), 1e-12);
  for (std::size_t i = 1; i < results.size(); ++i) {
    results[i].delta_pct = 100.0 * (results[i].score.mean - base_mean) / denom;
    results[i].flagged = std::abs(results[i].delta_pct) > 10.0;
  }
  std::ofstream f = open_out(out_dir + "/noise.csv");
  f << "sigma_o,sigma_a,mean,std,delta_pct,flagged\n";
  for (const NoiseResult& r : results) {
    char buf[200];
    std::snprintf(buf, sizeof(buf), "%g,%g,%.17g,%.17g,%.3f,%d\n", r.sigma_o,
                  r.sigma_a, r.score.mean, r.score.stddev, r.delta_pct,
                  r.flagged ? 1 : 0);
    f << buf;
  }
  return results;
}

GridSpec parse_grid_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("grid: cannot open '" + path + "'");
  GridSpec grid;
  std::string line;
  int lineno = 0;
  while (std::getline(f, line)) {
    ++lineno;
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#' || t[0] == ';') continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos) {
      throw std::invalid_argument("grid line " + std::to_string(lineno) +
                                  ": expected 'section.key = v1, v2, ...'");
    }
    const std::string key = trim(t.substr(0, eq));
    std::vector<std::string> values;
    std::stringstream ss(t.substr(eq + 1));
    std::string item;
    while (std::getline(ss, item, ',')) {
      item = trim(item);
      if (!item.empty()) values.push_back(item);
    }
    if (key.empty() || values.empty()) {
      throw std::invalid_argument("grid line " + std::to_string(lineno) +
                                  ": empty key or value list");
    }
    grid.emplace_back(key, values);
  }
  if (grid.empty()) throw std::invalid_argument("grid: no entries in '" + path + "'");
  return grid;
}

std::vector<GridCell> grid_search(const ExperimentConfig& base, const GridSpec& grid,
                                  const std::string& out_dir, std::size_t* best_index,
                                  ThreadPool* pool) {
  if (grid.empty()) throw std::invalid_argument("grid_search: empty grid");
  std::vector<ExperimentConfig> cells;
  std::vector<std::vector<std::string>> cell_values;
  std::vector<std::string> current(grid.size());
  const std::function<void(std::size_t, ExperimentConfig)> expand =
      [&](std::size_t i, ExperimentConfig cfg) {
        if (i == grid.size()) {
          cells.push_back(cfg);
          cell_values.push_back(current);
          return;
        }
        for (const std::string& v : grid[i].second) {
          ExperimentConfig next = cfg;
          next.set(grid[i].first, v);
          current[i] = v;
          expand(i + 1, next);
        }
      };
  expand(0, base);

  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  std::vector<GridCell> results;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    GridCell cell;
    cell.cfg = cells[i];
    cell.dir = out_dir + "/cell" + std::to_string(i);
    cell.score = run_cell(cells[i], cell.dir, pool, &cell.wall_seconds);
    results.push_back(std::move(cell));
  }
  std::size_t best = 0;
  for (std::size_t i = 1; i < results.size(); ++i) {
    if (results[i].score.mean > results[best].score.mean ||
        (results[i].score.mean == results[best].score.mean &&
         results[i].wall_seconds < results[best].wall_seconds)) {
      best = i;
    }
  }
  if (best_index) *best_index = best;

  std::ofstream f = open_out(out_dir + "/grid.csv");
  f << "cell";
  for (const auto& [key, values] : grid) f << "," << key;
  f << ",mean,std\n";
  for (std::size_t i = 0; i < results.size(); ++i) {
    f << i;
    for (const std::string& v : cell_values[i]) f << "," << v;
    char buf[80];
    std::snprintf(buf, sizeof(buf), ",%.17g,%.17g\n", results[i].score.mean,
                  results[i].score.stddev);
    f << buf;
  }
  return results;
}

}  // namespace mbrl
