#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mbrl/dynamics/ensemble.hpp"
#include "mbrl/envs/env.hpp"
#include "mbrl/envs/noise.hpp"
#include "mbrl/planners/backend.hpp"
#include "mbrl/planners/ilqg.hpp"
#include "mbrl/planners/shooting.hpp"

namespace mbrl {

// [dynamics] section of the config file.
struct DynamicsRunConfig {
  int members = 5;
  std::vector<int> hidden = {64, 64};
  std::string activation = "swish";
  double lr = 1e-3;
  int batch = 256;
  double holdout = 0.1;
  bool bootstrap = false;
  int epochs = 20;
  int multistep = 1;  // training rollout length; 1 trains single-step
  std::string propagation = "E";
  int particles = 1;
  int warmup_episodes = 1;
};

// Flat-section key-value config. Sections: [run], [noise], [env],
// [planner.rs], [planner.cem], [planner.ilqg], [dynamics]. Unknown sections
// or keys are errors; [env] keys are numeric physics overrides validated by
// the environment itself.
struct ExperimentConfig {
  std::string env = "cartpole";
  EnvParams env_params;
  std::string algo = "gt_cem";  // rs | pets_rs | pets_cem | gt_rs | gt_cem | ilqg
  long total_steps = 20000;
  int seeds = 4;
  std::uint64_t master_seed = 0;
  long retrain_every = 0;  // steps between retraining; 0 retrains each episode
  std::string scheme = "D";
  double penalty_multiplier = 1.0;
  double alive_bonus = 1.0;
  int extra_steps = 100;
  std::string out_dir = "out";
  int workers = 1;
  double sigma_o = 0.0;
  double sigma_a = 0.0;
  RsConfig rs;
  CemConfig cem;
  IlqgConfig ilqg;
  DynamicsRunConfig dyn;

  static ExperimentConfig from_file(const std::string& path);
  static ExperimentConfig from_string(const std::string& text);

  // key is "section.key" ("run.algo", "planner.cem.elites", "env.gravity");
  // unknown keys or malformed values throw.
  void set(const std::string& key, const std::string& value);
  void validate() const;

  // Canonical serialization: fixed section and key order, every key present,
  // doubles in %.17g. Fingerprint is a 64-bit FNV-1a of it in hex.
  std::string canonical_string() const;
  std::string fingerprint() const;

  bool is_gt() const { return algo == "gt_rs" || algo == "gt_cem" || algo == "ilqg"; }
  NoiseConfig noise() const;
  SchemeConfig scheme_config() const;
  EnsembleConfig ensemble_config(const EnvSpec& spec) const;
};

}  // namespace mbrl
