#include "mbrl/planners/shooting.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "mbrl/core/streams.hpp"

namespace mbrl {

namespace {

void validate_common(const EnvSpec& sp, const Vec& s0, int population, int horizon) {
  if (population < 1) throw std::invalid_argument("planner population must be >= 1");
  if (horizon < 1) throw std::invalid_argument("planner horizon must be >= 1");
  if (s0.size() != sp.obs_dim) throw std::invalid_argument("planner s0 dim mismatch");
}

}  // namespace

RsResult plan_rs(const RolloutBackend& backend, const Vec& s0, const RsConfig& cfg,
                 RngStream rng) {
  const EnvSpec& sp = backend.spec();
  validate_common(sp, s0, cfg.population, cfg.horizon);
  std::vector<Mat> cands(cfg.population);
  RngStream sample_rng = rng.split(streams::kCandidate);
  for (int c = 0; c < cfg.population; ++c) {
    RngStream cr = sample_rng.split(c);
    Mat seq(sp.act_dim, cfg.horizon);
    for (int t = 0; t < cfg.horizon; ++t) {
      for (Eigen::Index d = 0; d < sp.act_dim; ++d) {
        seq(d, t) = sp.act_low[d] + (sp.act_high[d] - sp.act_low[d]) * cr.uniform01();
      }
    }
    cands[c] = std::move(seq);
  }
  const Vec scores = backend.evaluate(s0, cands, rng.split(streams::kEval));
  int best = 0;
  for (int c = 1; c < cfg.population; ++c) {
    if (scores[c] > scores[best]) best = c;
  }
  RsResult out;
  out.actions = cands[best];
  out.value = scores[best];
  out.index = best;
  return out;
}

CemResult plan_cem(const RolloutBackend& backend, const Vec& s0, const CemConfig& cfg,
                   RngStream rng, const Mat& warm_mean) {
  const EnvSpec& sp = backend.spec();
  validate_common(sp, s0, cfg.population, cfg.horizon);
  if (cfg.elites < 1 || cfg.elites > cfg.population) {
    throw std::invalid_argument("cem elites must be in [1, population]");
  }
  if (cfg.iterations < 1) throw std::invalid_argument("cem iterations must be >= 1");
  if (cfg.alpha < 0.0 || cfg.alpha > 1.0) {
    throw std::invalid_argument("cem alpha must be in [0, 1]");
  }

  Mat mean;
  if (warm_mean.size() > 0) {
    if (warm_mean.rows() != sp.act_dim || warm_mean.cols() != cfg.horizon) {
      throw std::invalid_argument("cem warm start shape mismatch");
    }
    mean = warm_mean;
  } else {
    mean = Mat::Zero(sp.act_dim, cfg.horizon);
  }
  Mat std(sp.act_dim, cfg.horizon);
  for (Eigen::Index d = 0; d < sp.act_dim; ++d) {
    std.row(d).setConstant(cfg.init_std_frac * (sp.act_high[d] - sp.act_low[d]));
  }

  CemResult out;
  out.incumbent_value = -std::numeric_limits<double>::infinity();
  std::vector<Mat> cands(cfg.population);
  std::vector<int> order(cfg.population);

  RngStream iters_rng = rng.split(streams::kCandidate);
  RngStream evals_rng = rng.split(streams::kEval);
  for (int it = 0; it < cfg.iterations; ++it) {
    RngStream iter_rng = iters_rng.split(it);
    for (int c = 0; c < cfg.population; ++c) {
      RngStream cr = iter_rng.split(c);
      Mat seq(sp.act_dim, cfg.horizon);
      for (int t = 0; t < cfg.horizon; ++t) {
        for (Eigen::Index d = 0; d < sp.act_dim; ++d) {
          double z;
          do {
            z = cr.normal();
          } while (std::abs(z) > 2.0);
          seq(d, t) = std::clamp(mean(d, t) + z * std(d, t), sp.act_low[d],
                                 sp.act_high[d]);
        }
      }
      cands[c] = std::move(seq);
    }
    const Vec scores = backend.evaluate(s0, cands, evals_rng.split(it));
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int a, int b) {
      if (scores[a] != scores[b]) return scores[a] > scores[b];
      return a < b;
    });
    if (scores[order[0]] > out.incumbent_value) {
      out.incumbent_value = scores[order[0]];
      out.incumbent = cands[order[0]];
    }
    out.iter_best.push_back(out.incumbent_value);

    Mat new_mean = Mat::Zero(sp.act_dim, cfg.horizon);
    for (int e = 0; e < cfg.elites; ++e) new_mean += cands[order[e]];
    new_mean /= static_cast<double>(cfg.elites);
    Mat new_var = Mat::Zero(sp.act_dim, cfg.horizon);
    for (int e = 0; e < cfg.elites; ++e) {
      new_var += (cands[order[e]] - new_mean).array().square().matrix();
    }
    new_var /= static_cast<double>(cfg.elites);
    mean = cfg.alpha * new_mean + (1.0 - cfg.alpha) * mean;
    std = (cfg.alpha * new_var.array().sqrt() + (1.0 - cfg.alpha) * std.array())
              .max(cfg.std_floor)
              .matrix();
  }

  for (int t = 0; t < cfg.horizon; ++t) {
    for (Eigen::Index d = 0; d < sp.act_dim; ++d) {
      mean(d, t) = std::clamp(mean(d, t), sp.act_low[d], sp.act_high[d]);
    }
  }
  out.mean = mean;
  return out;
}

}  // namespace mbrl
