#pragma once

#include <map>
#include <memory>
#include <string>
#include <vector>

#include "mbrl/core/rng.hpp"
#include "mbrl/core/types.hpp"

namespace mbrl {

// Analytic environment. step/reward are pure functions of their arguments;
// episode state lives in EpisodeExecutor. Observations are the canonical
// state representation (angles appear as cos/sin pairs and are recovered
// with atan2 inside step).
class Environment {
 public:
  virtual ~Environment() = default;

  const EnvSpec& spec() const { return spec_; }

  virtual void reset(RngStream& rng, Vec& obs) const = 0;
  virtual void step(const Vec& obs, const Vec& act, Vec& next_obs) const = 0;
  virtual double reward(const Vec& obs, const Vec& act, const Vec& next_obs) const = 0;
  // Analytic derivatives of reward with respect to next_obs and act.
  virtual void reward_gradient(const Vec& obs, const Vec& act, const Vec& next_obs,
                               Vec& dr_dnext, Vec& dr_dact) const = 0;
  virtual bool terminated(const Vec& obs) const {
    (void)obs;
    return false;
  }

 protected:
  void check_dims(const Vec& obs, const Vec& act, const char* op) const;

  EnvSpec spec_;
};

using EnvParams = std::map<std::string, double>;

// Known names: pendulum, cartpole, cartpole_et, acrobot, mountaincar,
// reacher2d. params override physics constants; unknown names or keys throw.
std::unique_ptr<Environment> make_env(const std::string& name,
                                      const EnvParams& params = {});
const std::vector<std::string>& env_names();

}  // namespace mbrl
