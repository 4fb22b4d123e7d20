#include "mbrl/bench/experiment.hpp"

#include <chrono>
#include <memory>
#include <stdexcept>

#include "mbrl/core/streams.hpp"
#include "mbrl/planners/mpc.hpp"

namespace mbrl {

namespace {

class RandomPlanner : public Planner {
 public:
  explicit RandomPlanner(const EnvSpec& spec) : spec_(spec) {}

  Vec act(const Vec&, RngStream rng) override {
    Vec a(spec_.act_dim);
    for (Eigen::Index d = 0; d < spec_.act_dim; ++d) {
      a[d] = spec_.act_low[d] + (spec_.act_high[d] - spec_.act_low[d]) * rng.uniform01();
    }
    return a;
  }
  int horizon() const override { return 1; }

 private:
  const EnvSpec& spec_;
};

std::unique_ptr<Planner> make_shooting_planner(const ExperimentConfig& cfg,
                                               const RolloutBackend& backend) {
  if (cfg.algo == "gt_rs" || cfg.algo == "rs" || cfg.algo == "pets_rs") {
    return std::make_unique<RsPlanner>(backend, cfg.rs);
  }
  if (cfg.algo == "gt_cem" || cfg.algo == "pets_cem") {
    return std::make_unique<CemPlanner>(backend, cfg.cem);
  }
  throw std::logic_error("make_shooting_planner: not a shooting algo " + cfg.algo);
}

SeedSeries run_seed(const ExperimentConfig& cfg, int seed_idx) {
  SeedSeries series;
  series.seed = seed_idx;
  try {
    const std::unique_ptr<Environment> env = make_env(cfg.env, cfg.env_params);
    const EnvSpec& sp = env->spec();
    if (cfg.total_steps < sp.horizon) {
      throw std::invalid_argument("total_steps " + std::to_string(cfg.total_steps) +
                                  " is below one episode of " + cfg.env + " (" +
                                  std::to_string(sp.horizon) + ")");
    }
    EpisodeOptions opts;
    opts.noise = cfg.noise();
    opts.scheme = cfg.scheme_config();

    RngStream master(cfg.master_seed);
    RngStream seed_rng = master.split(streams::kSeedRun).split(seed_idx);
    long timestep = 0;
    const auto log_episode = [&](const EpisodeStats& st) {
      timestep += st.steps;
      series.points.push_back({timestep, st.episode_return});
    };

    if (cfg.is_gt()) {
      const GroundTruthBackend backend(*env, opts.scheme);
      std::unique_ptr<Planner> planner;
      if (cfg.algo == "ilqg") {
        planner = std::make_unique<IlqgPlanner>(*env, cfg.ilqg);
      } else {
        planner = make_shooting_planner(cfg, backend);
      }
      RngStream episodes = seed_rng.split(streams::kEpisode);
      long e = 0;
      while (timestep < cfg.total_steps) {
        log_episode(mpc_episode(*env, *planner, opts, episodes.split(e++)));
      }
      return series;
    }

    TransitionDataset data;
    DynamicsEnsemble ensemble(cfg.ensemble_config(sp), seed_rng);
    RandomPlanner random_planner(sp);
    RngStream warmups = seed_rng.split(streams::kWarmup);
    for (int w = 0; w < cfg.dyn.warmup_episodes && timestep < cfg.total_steps; ++w) {
      log_episode(mpc_episode(*env, random_planner, opts, warmups.split(w), &data));
    }

    const LearnedBackend backend(ensemble, *env,
                                 propagation_from_string(cfg.dyn.propagation),
                                 cfg.dyn.particles, opts.scheme);
    const std::unique_ptr<Planner> planner = make_shooting_planner(cfg, backend);
    RngStream trains = seed_rng.split(streams::kTrain);
    RngStream episodes = seed_rng.split(streams::kEpisode);
    long round = 0, e = 0;
    while (timestep < cfg.total_steps) {
      const RngStream train_rng = trains.split(round++);
      if (ensemble.kind() == DynKind::kProbabilistic) {
        ensemble.train_probabilistic(data, cfg.dyn.epochs, train_rng);
      } else if (cfg.dyn.multistep > 1) {
        ensemble.train_multistep(data, cfg.dyn.epochs, train_rng);
      } else {
        ensemble.train_deterministic(data, cfg.dyn.epochs, train_rng);
      }
      long collected = 0;
      do {
        const EpisodeStats st = mpc_episode(*env, *planner, opts, episodes.split(e++), &data);
        collected += st.steps;
        log_episode(st);
      } while (timestep < cfg.total_steps && collected < cfg.retrain_every);
    }
    return series;
  } catch (const std::exception& ex) {
    series.failed = true;
    series.error = ex.what();
    series.points.clear();
    return series;
  }
}

}  // namespace

ExperimentRecord run_experiment(const ExperimentConfig& cfg, ThreadPool* pool) {
  cfg.validate();
  ExperimentRecord rec;
  rec.fingerprint = cfg.fingerprint();
  rec.env = cfg.env;
  rec.algo = cfg.algo;
  rec.seeds.resize(cfg.seeds);

  const auto t0 = std::chrono::steady_clock::now();
  const auto work = [&](std::size_t s) {
    rec.seeds[s] = run_seed(cfg, static_cast<int>(s));
  };
  if (pool) {
    pool->parallel_for(cfg.seeds, work);
  } else if (cfg.workers > 1) {
    ThreadPool local(cfg.workers);
    local.parallel_for(cfg.seeds, work);
  } else {
    for (int s = 0; s < cfg.seeds; ++s) work(s);
  }
  rec.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return rec;
}

}  // namespace mbrl
