#include "mbrl/planners/backend.hpp"

#include <stdexcept>

namespace mbrl {

SchemeConfig make_scheme(const std::string& name, double penalty_multiplier,
                         double alive_bonus, int extra_steps) {
  if (name.size() != 1 || name[0] < 'A' || name[0] > 'E') {
    throw std::invalid_argument("termination scheme must be one of A|B|C|D|E, got '" +
                                name + "'");
  }
  SchemeConfig s;
  s.scheme = name[0];
  s.penalty_multiplier = penalty_multiplier;
  s.alive_bonus = alive_bonus;
  s.extra_steps = extra_steps;
  if (s.scheme == 'B' && penalty_multiplier <= 0.0) {
    throw std::invalid_argument("scheme B requires penalty_multiplier > 0");
  }
  if (s.scheme == 'E' && extra_steps < 0) {
    throw std::invalid_argument("scheme E requires extra_steps >= 0");
  }
  return s;
}

double apply_termination_scheme(const Vec& rewards, int first_term,
                                const SchemeConfig& scheme) {
  if (first_term < 0 || !scheme.adjusts_scores()) return rewards.sum();
  const int n = static_cast<int>(rewards.size());
  if (first_term >= n) return rewards.sum();
  double total = rewards.head(first_term).sum();
  if (scheme.scheme == 'B') {
    total -= static_cast<double>(n - first_term) * scheme.penalty_multiplier *
             scheme.alive_bonus;
  }
  return total;
}

GroundTruthBackend::GroundTruthBackend(const Environment& env, SchemeConfig scheme)
    : env_(env), scheme_(scheme) {}

Vec GroundTruthBackend::evaluate(const Vec& s0, const std::vector<Mat>& candidates,
                                 RngStream) const {
  const EnvSpec& sp = env_.spec();
  Vec scores(candidates.size());
  Vec s(sp.obs_dim), next(sp.obs_dim), a(sp.act_dim);
  for (std::size_t c = 0; c < candidates.size(); ++c) {
    const Mat& seq = candidates[c];
    if (seq.rows() != sp.act_dim) {
      throw std::invalid_argument("evaluate: candidate act dim mismatch");
    }
    Vec rewards(seq.cols());
    int first_term = -1;
    s = s0;
    for (Eigen::Index t = 0; t < seq.cols(); ++t) {
      a = seq.col(t);
      env_.step(s, a, next);
      rewards[t] = env_.reward(s, a, next);
      if (sp.has_termination && first_term < 0 && env_.terminated(next)) {
        first_term = static_cast<int>(t);
      }
      s = next;
    }
    scores[c] = apply_termination_scheme(rewards, first_term, scheme_);
  }
  return scores;
}

LearnedBackend::LearnedBackend(const DynamicsEnsemble& ensemble, const Environment& env,
                               PropagationMode mode, int particles, SchemeConfig scheme)
    : ensemble_(ensemble), env_(env), mode_(mode), particles_(particles),
      scheme_(scheme) {
  if (particles_ < 1) throw std::invalid_argument("LearnedBackend: particles must be >= 1");
}

Vec LearnedBackend::evaluate(const Vec& s0, const std::vector<Mat>& candidates,
                             RngStream rng) const {
  const BatchRollout roll =
      ensemble_.propagate(env_, s0, candidates, mode_, particles_, rng);
  Vec scores = Vec::Zero(candidates.size());
  for (int c = 0; c < roll.candidates; ++c) {
    for (int p = 0; p < roll.particles; ++p) {
      const Eigen::Index q = static_cast<Eigen::Index>(c) * roll.particles + p;
      Vec rewards = roll.rewards.row(q).transpose();
      scores[c] += apply_termination_scheme(rewards, roll.first_term[q], scheme_);
    }
    scores[c] /= static_cast<double>(roll.particles);
  }
  return scores;
}

}  // namespace mbrl
