#pragma once

#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "mbrl/core/rng.hpp"
#include "mbrl/core/types.hpp"

namespace mbrl {

enum class Activation { kTanh, kRelu, kSwish };

Activation activation_from_string(const std::string& s);
std::string activation_name(Activation a);

struct MlpConfig {
  int in_dim = 0;
  int out_dim = 0;
  std::vector<int> hidden = {256, 256};
  Activation act = Activation::kSwish;
};

// Layer inputs and pre-activations saved by a forward pass; multi-step
// losses keep one per rollout step and run backward in reverse order.
struct MlpCache {
  std::vector<Mat> in;
  std::vector<Mat> z;
};

// Fully connected net with a linear output layer. Columns are samples
// (in_dim x batch in, out_dim x batch out). Backward accumulates parameter
// gradients and returns the input gradient so losses can chain through
// multi-step rollouts.
class Mlp {
 public:
  explicit Mlp(const MlpConfig& cfg);

  // Uniform fan-in init: U(-1/sqrt(fan_in), 1/sqrt(fan_in)) for weights and
  // biases, layer by layer.
  void init(RngStream& rng);

  Mat forward(const Mat& x) const;
  Mat forward_cached(const Mat& x, MlpCache& cache) const;
  // dy is dLoss/dOutput for the batch that produced cache; accumulates
  // parameter gradients, returns dLoss/dInput.
  Mat backward(const MlpCache& cache, const Mat& dy);

  void zero_grad();
  void adam_step(double lr, double beta1 = 0.9, double beta2 = 0.999,
                 double eps = 1e-8);

  const MlpConfig& config() const { return cfg_; }
  int param_count() const;
  Vec flat_params() const;
  void set_flat_params(const Vec& p);
  Vec flat_grads() const;

  bool params_finite() const;

  nlohmann::json to_json() const;
  static Mlp from_json(const nlohmann::json& j);

 private:
  void apply_activation(Mat& z) const;
  Mat activation_grad(const Mat& z) const;

  MlpConfig cfg_;
  std::vector<Mat> w_;
  std::vector<Vec> b_;
  std::vector<Mat> gw_;
  std::vector<Vec> gb_;
  // Adam state.
  std::vector<Mat> mw_, vw_;
  std::vector<Vec> mb_, vb_;
  long t_ = 0;
};

}  // namespace mbrl
