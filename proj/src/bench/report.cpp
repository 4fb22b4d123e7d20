#include "mbrl/bench/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace mbrl {

namespace {

std::string fmt_g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::ofstream open_out(const std::string& path) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("report: cannot write '" + path + "'");
  return f;
}

}  // namespace

void write_raw_csv(const ExperimentRecord& rec, const std::string& path) {
  std::ofstream f = open_out(path);
  f << "seed,timestep,episode_return\n";
  for (const SeedSeries& s : rec.seeds) {
    for (const ScorePoint& p : s.points) {
      f << s.seed << "," << p.timestep << "," << fmt_g17(p.episode_return) << "\n";
    }
  }
  if (!f) throw std::runtime_error("report: write failed for '" + path + "'");
}

ExperimentRecord read_raw_csv(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("report: cannot open '" + path + "'");
  std::string line;
  if (!std::getline(f, line) || line != "seed,timestep,episode_return") {
    throw std::runtime_error("report: '" + path +
                             "' missing header seed,timestep,episode_return");
  }
  ExperimentRecord rec;
  int lineno = 1;
  while (std::getline(f, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string seed_s, t_s, r_s;
    if (!std::getline(ss, seed_s, ',') || !std::getline(ss, t_s, ',') ||
        !std::getline(ss, r_s)) {
      throw std::runtime_error("report: malformed row at line " +
                               std::to_string(lineno));
    }
    const int seed = std::stoi(seed_s);
    ScorePoint p;
    p.timestep = std::stol(t_s);
    p.episode_return = std::stod(r_s);
    while (rec.seeds.size() <= static_cast<std::size_t>(seed)) {
      SeedSeries s;
      s.seed = static_cast<int>(rec.seeds.size());
      rec.seeds.push_back(s);
    }
    rec.seeds[seed].points.push_back(p);
  }
  return rec;
}

nlohmann::json summary_json(const ExperimentRecord& rec, const ScoreSummary& score) {
  nlohmann::json j;
  j["schema_version"] = 1;
  j["env"] = rec.env;
  j["algo"] = rec.algo;
  j["fingerprint"] = rec.fingerprint;
  j["mean"] = score.mean;
  j["std"] = score.stddev;
  j["n_seeds"] = score.n_seeds;
  j["n_effective_seeds"] = score.n_effective_seeds;
  j["n_points"] = score.n_points;
  j["window_steps"] = score.window_steps;
  j["curve_smoothing"] = "sliding window of 5 episodes";
  nlohmann::json failed = nlohmann::json::array();
  for (const SeedSeries& s : rec.seeds) {
    if (s.failed) failed.push_back({{"seed", s.seed}, {"error", s.error}});
  }
  j["failed_seeds"] = failed;
  return j;
}

std::string markdown_table(const std::vector<ExperimentRecord>& recs,
                           const std::vector<ScoreSummary>& scores) {
  if (recs.size() != scores.size()) {
    throw std::invalid_argument("markdown_table: records/scores size mismatch");
  }
  std::string out = "| env | algo | return |\n|---|---|---|\n";
  for (std::size_t i = 0; i < recs.size(); ++i) {
    out += "| " + recs[i].env + " | " + recs[i].algo + " | " +
           format_mean_std(scores[i].mean, scores[i].stddev) + " |\n";
  }
  return out;
}

std::string curves_csv(const ExperimentRecord& rec, int window_episodes) {
  std::vector<const SeedSeries*> effective;
  for (const SeedSeries& s : rec.seeds) {
    if (!s.failed && !s.points.empty()) effective.push_back(&s);
  }
  std::string out = "timestep,smoothed_mean,smoothed_std\n";
  if (effective.empty()) return out;
  std::size_t n = effective[0]->points.size();
  for (const SeedSeries* s : effective) n = std::min(n, s->points.size());
  std::vector<std::vector<double>> smoothed;
  for (const SeedSeries* s : effective) {
    std::vector<double> returns;
    returns.reserve(s->points.size());
    for (const ScorePoint& p : s->points) returns.push_back(p.episode_return);
    smoothed.push_back(sliding_window(returns, window_episodes));
  }
  for (std::size_t i = 0; i < n; ++i) {
    long t = 0;
    double sum = 0.0, sumsq = 0.0;
    for (std::size_t s = 0; s < effective.size(); ++s) {
      t = std::max(t, effective[s]->points[i].timestep);
      sum += smoothed[s][i];
      sumsq += smoothed[s][i] * smoothed[s][i];
    }
    const double m = sum / static_cast<double>(effective.size());
    const double sd =
        std::sqrt(std::max(0.0, sumsq / static_cast<double>(effective.size()) - m * m));
    out += std::to_string(t) + "," + fmt_g17(m) + "," + fmt_g17(sd) + "\n";
  }
  return out;
}

void emit_report(const ExperimentRecord& rec, const ScoreSummary& score,
                 const std::string& out_dir, const std::vector<std::string>& formats) {
  if (formats.empty()) {
    throw std::invalid_argument("emit_report: no format given (supported: csv|json|md|curves)");
  }
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) {
    throw std::runtime_error("emit_report: cannot create '" + out_dir +
                             "': " + ec.message());
  }
  for (const std::string& fmt : formats) {
    if (fmt == "csv") {
      write_raw_csv(rec, out_dir + "/raw.csv");
    } else if (fmt == "json") {
      std::ofstream f = open_out(out_dir + "/summary.json");
      f << summary_json(rec, score).dump(2) << "\n";
    } else if (fmt == "md") {
      std::ofstream f = open_out(out_dir + "/table.md");
      f << markdown_table({rec}, {score});
    } else if (fmt == "curves") {
      std::ofstream f = open_out(out_dir + "/curves.csv");
      f << curves_csv(rec);
    } else {
      throw std::invalid_argument("emit_report: unknown format '" + fmt +
                                  "' (supported: csv|json|md|curves)");
    }
  }
}

void write_timing(const ExperimentRecord& rec, const std::string& out_dir) {
  std::ofstream f = open_out(out_dir + "/timing.json");
  nlohmann::json j;
  j["wall_seconds"] = rec.wall_seconds;
  f << j.dump(2) << "\n";
}

}  // namespace mbrl
