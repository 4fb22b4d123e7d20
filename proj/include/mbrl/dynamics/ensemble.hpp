#pragma once

#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "mbrl/core/rng.hpp"
#include "mbrl/core/types.hpp"
#include "mbrl/dynamics/dataset.hpp"
#include "mbrl/envs/env.hpp"
#include "mbrl/net/mlp.hpp"

namespace mbrl {

enum class DynKind { kDeterministic, kProbabilistic };
enum class PropagationMode { kE, kTS1, kTSinf, kDS };

DynKind dyn_kind_from_string(const std::string& s);
std::string dyn_kind_name(DynKind k);
PropagationMode propagation_from_string(const std::string& s);
std::string propagation_name(PropagationMode m);

struct EnsembleConfig {
  int obs_dim = 0;
  int act_dim = 0;
  int members = 5;
  DynKind kind = DynKind::kProbabilistic;
  std::vector<int> hidden = {256, 256};
  Activation act = Activation::kSwish;
  double lr = 1e-3;
  int batch = 256;
  double holdout = 0.1;
  bool bootstrap = false;
  int ms_horizon = 2;
  // Trainable soft log-variance bounds (normalized-target space) and the
  // small regularizer that keeps them tight.
  double logvar_min_init = -10.0;
  double logvar_max_init = 0.5;
  double bound_reg = 0.01;
};

struct TrainReport {
  double train_loss = 0.0;    // mean over members, last epoch
  double holdout_loss = 0.0;  // mean over members on the shared holdout split
  int epochs = 0;
  std::size_t train_size = 0;
  std::size_t holdout_size = 0;
};

// Rollout of a batch of candidate action sequences, all starting from the
// same state. Column q = candidate * particles + particle.
struct BatchRollout {
  int candidates = 0;
  int particles = 0;
  Mat rewards;                  // (candidates*particles) x horizon
  std::vector<int> first_term;  // per column, index of first predicted
                                // terminal transition, -1 if none
  std::vector<Mat> states;      // if captured: horizon+1 of obs_dim x columns
};

// Ensemble of delta-predicting models (next = state + delta). Members share
// one input and one target normalizer and differ by init and shuffling (and
// bootstrap resampling when enabled). All training continues from the
// current parameters.
class DynamicsEnsemble {
 public:
  DynamicsEnsemble(EnsembleConfig cfg, RngStream init_rng);

  const EnsembleConfig& config() const { return cfg_; }
  int members() const { return cfg_.members; }
  DynKind kind() const { return cfg_.kind; }

  TrainReport train_deterministic(const TransitionDataset& data, int epochs,
                                  RngStream rng);
  TrainReport train_probabilistic(const TransitionDataset& data, int epochs,
                                  RngStream rng);
  TrainReport train_multistep(const TransitionDataset& data, int epochs, RngStream rng);

  // Per-member next-state prediction. obs/act columns are samples; var (when
  // requested and probabilistic) is the per-dimension predictive variance of
  // the next state.
  void predict(int member, const Mat& obs, const Mat& act, Mat& mean, Mat* var) const;

  // Particle propagation from s0 under each candidate sequence (act_dim x
  // horizon). Column (c, p) draws from rng.split(c).split(p), so results are
  // independent of batching and worker count. Rewards use the env's reward
  // on predicted transitions; first_term uses its termination predicate.
  BatchRollout propagate(const Environment& env, const Vec& s0,
                         const std::vector<Mat>& action_seqs, PropagationMode mode,
                         int particles, RngStream rng, bool capture_states = false) const;

  nlohmann::json to_json() const;
  static DynamicsEnsemble from_json(const nlohmann::json& j);

  const Normalizer& input_normalizer() const { return in_norm_; }
  const Normalizer& target_normalizer() const { return target_norm_; }
  const Vec& logvar_min(int member) const { return clamps_[member].min_lv; }
  const Vec& logvar_max(int member) const { return clamps_[member].max_lv; }

 private:
  struct Clamp {
    Vec min_lv, max_lv;
    Vec m_min, v_min, m_max, v_max;  // adam state
    long t = 0;
  };

  struct Split {
    std::vector<std::size_t> train;
    std::vector<std::size_t> holdout;
  };
  Split make_split(std::size_t n, RngStream& rng) const;

  void refit_normalizers(const TransitionDataset& data);
  Mat inputs_for(const TransitionDataset& data, const std::vector<std::size_t>& idx) const;
  Mat targets_for(const TransitionDataset& data, const std::vector<std::size_t>& idx) const;
  // Soft-clamped logvar and its partials wrt the raw head and both bounds.
  void soft_clamp(int member, const Mat& raw, Mat& lv, Mat& d_raw, Mat& d_max,
                  Mat& d_min) const;

  double deterministic_epoch(int member, const Mat& x, const Mat& y, int batch,
                             RngStream& rng, bool update);
  double probabilistic_epoch(int member, const Mat& x, const Mat& y, int batch,
                             RngStream& rng, bool update);

  EnsembleConfig cfg_;
  std::vector<Mlp> members_;
  std::vector<Clamp> clamps_;
  Normalizer in_norm_;
  Normalizer target_norm_;
};

}  // namespace mbrl
