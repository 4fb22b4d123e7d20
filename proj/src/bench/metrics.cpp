#include "mbrl/bench/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <stdexcept>

namespace mbrl {

std::vector<double> sliding_window(const std::vector<double>& xs, int w) {
  if (w < 1) throw std::invalid_argument("sliding_window: w must be >= 1");
  std::vector<double> out(xs.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sum += xs[i];
    if (i >= static_cast<std::size_t>(w)) sum -= xs[i - w];
    const std::size_t n = std::min<std::size_t>(i + 1, w);
    out[i] = sum / static_cast<double>(n);
  }
  return out;
}

ScoreSummary final_score(const ExperimentRecord& rec, long window_steps) {
  if (window_steps < 0) throw std::invalid_argument("final_score: negative window");
  ScoreSummary s;
  s.n_seeds = static_cast<int>(rec.seeds.size());
  s.window_steps = window_steps;
  long end = 0;
  bool any = false;
  for (const SeedSeries& seed : rec.seeds) {
    if (seed.failed || seed.points.empty()) continue;
    ++s.n_effective_seeds;
    end = std::max(end, seed.points.back().timestep);
    any = true;
  }
  if (!any) throw std::runtime_error("final_score: no successful seeds with returns");
  const long start = end - window_steps;
  double sum = 0.0, sumsq = 0.0;
  int n = 0;
  for (const SeedSeries& seed : rec.seeds) {
    if (seed.failed) continue;
    for (const ScorePoint& p : seed.points) {
      if (p.timestep >= start && p.timestep <= end) {
        sum += p.episode_return;
        sumsq += p.episode_return * p.episode_return;
        ++n;
      }
    }
  }
  if (n == 0) throw std::runtime_error("final_score: empty final window");
  s.n_points = n;
  s.mean = sum / n;
  s.stddev = std::sqrt(std::max(0.0, sumsq / n - s.mean * s.mean));
  return s;
}

std::vector<RankRow> rank_table(const std::vector<std::string>& envs,
                                const std::vector<std::string>& algos,
                                const std::vector<RankEntry>& cells) {
  if (envs.empty() || algos.empty()) {
    throw std::invalid_argument("rank_table: envs and algos must be non-empty");
  }
  std::map<std::string, std::map<std::string, double>> by_env;
  for (const RankEntry& c : cells) by_env[c.env][c.algo] = c.mean;

  const int n_algos = static_cast<int>(algos.size());
  std::map<std::string, std::vector<double>> ranks;
  for (const std::string& env : envs) {
    const auto& scores = by_env[env];
    std::vector<std::pair<double, std::string>> present;
    for (const std::string& a : algos) {
      const auto it = scores.find(a);
      if (it != scores.end()) present.emplace_back(it->second, a);
    }
    std::sort(present.begin(), present.end(), [](const auto& x, const auto& y) {
      if (x.first != y.first) return x.first > y.first;
      return x.second < y.second;
    });
    std::size_t i = 0;
    while (i < present.size()) {
      std::size_t j = i;
      while (j < present.size() && present[j].first == present[i].first) ++j;
      const double avg_rank = (static_cast<double>(i + 1) + static_cast<double>(j)) / 2.0;
      for (std::size_t k = i; k < j; ++k) ranks[present[k].second].push_back(avg_rank);
      i = j;
    }
    for (const std::string& a : algos) {
      if (scores.find(a) == scores.end()) {
        ranks[a].push_back(static_cast<double>(n_algos));
      }
    }
  }

  std::vector<RankRow> rows;
  for (const std::string& a : algos) {
    std::vector<double> r = ranks[a];
    RankRow row;
    row.algo = a;
    row.n_algos = n_algos;
    double sum = 0.0;
    for (const double v : r) sum += v;
    row.mean_rank = sum / static_cast<double>(r.size());
    std::sort(r.begin(), r.end());
    const std::size_t m = r.size();
    row.median_rank = (m % 2 == 1) ? r[m / 2] : 0.5 * (r[m / 2 - 1] + r[m / 2]);
    rows.push_back(row);
  }
  return rows;
}

std::string format_mean_std(double mean, double stddev) {
  char buf[80];
  std::snprintf(buf, sizeof(buf), "%.1f ± %.1f", mean, stddev);
  return buf;
}

std::string format_rank(const RankRow& row) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%.1f / %d", row.mean_rank, row.n_algos);
  return buf;
}

}  // namespace mbrl
