#pragma once

#include <Eigen/Dense>
#include <stdexcept>
#include <string>
#include <vector>

namespace mbrl {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

// One environment interaction: observation, commanded action, next
// observation, reward, and whether the transition ended the episode.
struct Transition {
  Vec obs;
  Vec act;
  Vec next_obs;
  double reward = 0.0;
  bool terminated = false;
};

struct Trajectory {
  std::vector<Transition> steps;

  std::size_t size() const { return steps.size(); }
  bool empty() const { return steps.empty(); }
};

struct EnvSpec {
  std::string name;
  int obs_dim = 0;
  int act_dim = 0;
  Vec act_low;
  Vec act_high;
  int horizon = 0;
  bool has_termination = false;
};

inline double trajectory_return(const Trajectory& traj, double gamma = 1.0) {
  double total = 0.0;
  double scale = 1.0;
  for (const Transition& t : traj.steps) {
    total += scale * t.reward;
    scale *= gamma;
  }
  return total;
}

inline Vec clamp_action(const EnvSpec& spec, const Vec& a) {
  if (a.size() != spec.act_dim) {
    throw std::invalid_argument("clamp_action: action dim " +
                                std::to_string(a.size()) + " != " +
                                std::to_string(spec.act_dim) + " for env " +
                                spec.name);
  }
  return a.cwiseMax(spec.act_low).cwiseMin(spec.act_high);
}

}  // namespace mbrl
