#pragma once

#include <string>
#include <vector>

#include "mbrl/core/rng.hpp"
#include "mbrl/core/types.hpp"
#include "mbrl/dynamics/ensemble.hpp"
#include "mbrl/envs/env.hpp"

namespace mbrl {

// Early-termination handling for candidate scoring and episode execution.
// A: planner unaware, execution also ignores termination.
// B: rewards from the first predicted termination on are replaced by
//    -(penalty_multiplier * alive_bonus).
// C: rewards zeroed from the first predicted termination on.
// D: planner unaware, execution stops at termination.
// E: scores like C; extra post-termination interaction happens in the
//    data-collection loop.
struct SchemeConfig {
  char scheme = 'D';
  double penalty_multiplier = 1.0;
  double alive_bonus = 1.0;
  int extra_steps = 100;

  bool stop_on_termination() const { return scheme != 'A'; }
  bool adjusts_scores() const { return scheme == 'B' || scheme == 'C' || scheme == 'E'; }
};

SchemeConfig make_scheme(const std::string& name, double penalty_multiplier = 1.0,
                         double alive_bonus = 1.0, int extra_steps = 100);

// rewards holds per-step planned rewards; first_term is the index of the
// first transition entering a terminated state, -1 if none.
double apply_termination_scheme(const Vec& rewards, int first_term,
                                const SchemeConfig& scheme);

// Scores candidate action sequences (act_dim x horizon each) from a start
// state. Read-only during planning; rng use is keyed per candidate.
class RolloutBackend {
 public:
  virtual ~RolloutBackend() = default;
  virtual Vec evaluate(const Vec& s0, const std::vector<Mat>& candidates,
                       RngStream rng) const = 0;
  virtual const EnvSpec& spec() const = 0;
};

class GroundTruthBackend : public RolloutBackend {
 public:
  GroundTruthBackend(const Environment& env, SchemeConfig scheme);
  Vec evaluate(const Vec& s0, const std::vector<Mat>& candidates,
               RngStream rng) const override;
  const EnvSpec& spec() const override { return env_.spec(); }

 private:
  const Environment& env_;
  SchemeConfig scheme_;
};

class LearnedBackend : public RolloutBackend {
 public:
  LearnedBackend(const DynamicsEnsemble& ensemble, const Environment& env,
                 PropagationMode mode, int particles, SchemeConfig scheme);
  Vec evaluate(const Vec& s0, const std::vector<Mat>& candidates,
               RngStream rng) const override;
  const EnvSpec& spec() const override { return env_.spec(); }

 private:
  const DynamicsEnsemble& ensemble_;
  const Environment& env_;
  PropagationMode mode_;
  int particles_;
  SchemeConfig scheme_;
};

}  // namespace mbrl
