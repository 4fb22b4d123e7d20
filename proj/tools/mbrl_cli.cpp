#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "mbrl/bench/experiment.hpp"
#include "mbrl/bench/report.hpp"
#include "mbrl/bench/sweeps.hpp"

namespace {

const std::vector<std::string> kAllFormats = {"csv", "json", "md", "curves"};

struct Overrides {
  std::string env, algo, out;
  long steps = -1;
  int seeds = -1;
};

void apply_overrides(mbrl::ExperimentConfig& cfg, const Overrides& o) {
  if (!o.env.empty()) cfg.env = o.env;
  if (!o.algo.empty()) cfg.algo = o.algo;
  if (o.steps >= 0) cfg.total_steps = o.steps;
  if (o.seeds >= 0) cfg.seeds = o.seeds;
  if (!o.out.empty()) cfg.out_dir = o.out;
}

void print_score(const std::string& env, const std::string& algo,
                 const mbrl::ScoreSummary& s) {
  std::printf("%s %s: %s  (window %ld steps, %d returns, %d/%d seeds)\n", env.c_str(),
              algo.c_str(), mbrl::format_mean_std(s.mean, s.stddev).c_str(),
              s.window_steps, s.n_points, s.n_effective_seeds, s.n_seeds);
}

void warn_failed(const mbrl::ExperimentRecord& rec) {
  for (const mbrl::SeedSeries& s : rec.seeds) {
    if (s.failed) {
      std::fprintf(stderr, "warning: seed %d failed: %s\n", s.seed, s.error.c_str());
    }
  }
}

int cmd_run(const std::string& config_path, const Overrides& o) {
  mbrl::ExperimentConfig cfg = mbrl::ExperimentConfig::from_file(config_path);
  apply_overrides(cfg, o);
  cfg.validate();
  const mbrl::ExperimentRecord rec = mbrl::run_experiment(cfg);
  warn_failed(rec);
  const mbrl::ScoreSummary score = mbrl::final_score(rec);
  mbrl::emit_report(rec, score, cfg.out_dir, kAllFormats);
  mbrl::write_timing(rec, cfg.out_dir);
  std::ofstream f(cfg.out_dir + "/config.ini");
  if (!f) throw std::runtime_error("cannot write " + cfg.out_dir + "/config.ini");
  f << cfg.canonical_string();
  print_score(cfg.env, cfg.algo, score);
  return 0;
}

int cmd_sweep(const std::string& config_path, const std::string& grid_path,
              const Overrides& o) {
  mbrl::ExperimentConfig cfg = mbrl::ExperimentConfig::from_file(config_path);
  apply_overrides(cfg, o);
  cfg.validate();
  const mbrl::GridSpec grid = mbrl::parse_grid_file(grid_path);
  std::size_t best = 0;
  const std::vector<mbrl::GridCell> cells =
      mbrl::grid_search(cfg, grid, cfg.out_dir, &best);
  for (std::size_t i = 0; i < cells.size(); ++i) {
    std::printf("cell %zu%s: ", i, i == best ? " (best)" : "");
    print_score(cells[i].cfg.env, cells[i].cfg.algo, cells[i].score);
  }
  std::printf("best cell %zu -> %s\n", best, cells[best].dir.c_str());
  return 0;
}

int cmd_horizon(const std::string& config_path, const std::string& horizons_s,
                const Overrides& o) {
  mbrl::ExperimentConfig cfg = mbrl::ExperimentConfig::from_file(config_path);
  apply_overrides(cfg, o);
  cfg.validate();
  std::vector<int> horizons;
  std::stringstream ss(horizons_s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) horizons.push_back(std::stoi(item));
  }
  const auto results = mbrl::horizon_sweep(cfg, horizons, cfg.out_dir);
  for (const mbrl::HorizonResult& r : results) {
    std::printf("horizon %3d: %s\n", r.horizon,
                mbrl::format_mean_std(r.score.mean, r.score.stddev).c_str());
  }
  return 0;
}

int cmd_noise(const std::string& config_path, double sigma_o, double sigma_a,
              const Overrides& o) {
  mbrl::ExperimentConfig cfg = mbrl::ExperimentConfig::from_file(config_path);
  apply_overrides(cfg, o);
  cfg.validate();
  const auto results = mbrl::noise_sweep(cfg, sigma_o, sigma_a, cfg.out_dir);
  for (const mbrl::NoiseResult& r : results) {
    std::printf("sigma_o=%-5g sigma_a=%-5g %s  delta %+0.2f%%%s\n", r.sigma_o,
                r.sigma_a, mbrl::format_mean_std(r.score.mean, r.score.stddev).c_str(),
                r.delta_pct, r.flagged ? "  [>10%]" : "");
  }
  return 0;
}

int cmd_report(const std::string& in_dir, const std::string& format) {
  if (format.empty()) {
    throw std::invalid_argument("report: --format required (csv|json|md|curves)");
  }
  mbrl::ExperimentRecord rec = mbrl::read_raw_csv(in_dir + "/raw.csv");
  const std::string summary_path = in_dir + "/summary.json";
  if (std::filesystem::exists(summary_path)) {
    std::ifstream f(summary_path);
    nlohmann::json j;
    f >> j;
    rec.env = j.value("env", "");
    rec.algo = j.value("algo", "");
    rec.fingerprint = j.value("fingerprint", "");
  }
  const mbrl::ScoreSummary score = mbrl::final_score(rec);
  mbrl::emit_report(rec, score, in_dir, {format});
  print_score(rec.env, rec.algo, score);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"model-based RL planning and benchmarking toolkit"};
  app.require_subcommand(1);

  std::string config_path, grid_path, horizons = "10,20,30,50,100";
  std::string in_dir, format;
  double sigma_o = -1.0, sigma_a = -1.0;
  Overrides o;

  const auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--config", config_path, "experiment config file")->required();
    cmd->add_option("--env", o.env, "override run.env");
    cmd->add_option("--algo", o.algo, "override run.algo");
    cmd->add_option("--steps", o.steps, "override run.total_steps");
    cmd->add_option("--seeds", o.seeds, "override run.seeds");
    cmd->add_option("--out", o.out, "override run.out");
  };

  CLI::App* run = app.add_subcommand("run", "run one experiment and emit reports");
  add_common(run);
  CLI::App* sweep = app.add_subcommand("sweep", "grid search over hyperparameters");
  add_common(sweep);
  sweep->add_option("--grid", grid_path, "grid file: section.key = v1, v2, ...")
      ->required();
  CLI::App* horizon = app.add_subcommand("horizon", "planning-horizon sweep");
  add_common(horizon);
  horizon->add_option("--horizons", horizons, "comma-separated planning horizons");
  CLI::App* noise = app.add_subcommand("noise", "noise-robustness study");
  add_common(noise);
  noise->add_option("--sigma-o", sigma_o, "observation noise std (omit for preset)");
  noise->add_option("--sigma-a", sigma_a, "action noise std (omit for preset)");
  CLI::App* report = app.add_subcommand("report", "re-emit reports from raw.csv");
  report->add_option("--in", in_dir, "directory containing raw.csv")->required();
  report->add_option("--format", format, "csv|json|md|curves")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) return cmd_run(config_path, o);
    if (sweep->parsed()) return cmd_sweep(config_path, grid_path, o);
    if (horizon->parsed()) return cmd_horizon(config_path, horizons, o);
    if (noise->parsed()) return cmd_noise(config_path, sigma_o, sigma_a, o);
    if (report->parsed()) return cmd_report(in_dir, format);
  } catch (const std::exception& ex) {
    std::fprintf(stderr, "error: %s\n", ex.what());
    return 1;
  }
  return 0;
}
