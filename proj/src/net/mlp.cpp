#include "mbrl/net/mlp.hpp"

#include <cmath>
#include <stdexcept>

namespace mbrl {

Activation activation_from_string(const std::string& s) {
  if (s == "tanh") return Activation::kTanh;
  if (s == "relu") return Activation::kRelu;
  if (s == "swish") return Activation::kSwish;
  throw std::invalid_argument("unknown activation '" + s + "' (tanh|relu|swish)");
}

std::string activation_name(Activation a) {
  switch (a) {
    case Activation::kTanh: return "tanh";
    case Activation::kRelu: return "relu";
    case Activation::kSwish: return "swish";
  }
  return "?";
}

Mlp::Mlp(const MlpConfig& cfg) : cfg_(cfg) {
  if (cfg_.in_dim <= 0 || cfg_.out_dim <= 0) {
    throw std::invalid_argument("Mlp: in/out dims must be positive");
  }
  std::vector<int> dims;
  dims.push_back(cfg_.in_dim);
  for (int h : cfg_.hidden) {
    if (h <= 0) throw std::invalid_argument("Mlp: hidden sizes must be positive");
    dims.push_back(h);
  }
  dims.push_back(cfg_.out_dim);
  for (std::size_t l = 0; l + 1 < dims.size(); ++l) {
    w_.push_back(Mat::Zero(dims[l + 1], dims[l]));
    b_.push_back(Vec::Zero(dims[l + 1]));
    gw_.push_back(Mat::Zero(dims[l + 1], dims[l]));
    gb_.push_back(Vec::Zero(dims[l + 1]));
    mw_.push_back(Mat::Zero(dims[l + 1], dims[l]));
    vw_.push_back(Mat::Zero(dims[l + 1], dims[l]));
    mb_.push_back(Vec::Zero(dims[l + 1]));
    vb_.push_back(Vec::Zero(dims[l + 1]));
  }
}

void Mlp::init(RngStream& rng) {
  for (std::size_t l = 0; l < w_.size(); ++l) {
    const double bound = 1.0 / std::sqrt(static_cast<double>(w_[l].cols()));
    for (Eigen::Index c = 0; c < w_[l].cols(); ++c) {
      for (Eigen::Index r = 0; r < w_[l].rows(); ++r) {
        w_[l](r, c) = rng.uniform(-bound, bound);
      }
    }
    for (Eigen::Index r = 0; r < b_[l].size(); ++r) {
      b_[l][r] = rng.uniform(-bound, bound);
    }
  }
}

void Mlp::apply_activation(Mat& z) const {
  switch (cfg_.act) {
    case Activation::kTanh:
      z = z.array().tanh();
      break;
    case Activation::kRelu:
      z = z.cwiseMax(0.0);
      break;
    case Activation::kSwish:
      z = z.array() / (1.0 + (-z.array()).exp());
      break;
  }
}

Mat Mlp::activation_grad(const Mat& z) const {
  switch (cfg_.act) {
    case Activation::kTanh: {
      Mat t = z.array().tanh();
      return 1.0 - t.array().square();
    }
    case Activation::kRelu:
      return (z.array() > 0.0).cast<double>();
    case Activation::kSwish: {
      Mat sig = 1.0 / (1.0 + (-z.array()).exp());
      return sig.array() * (1.0 + z.array() * (1.0 - sig.array()));
    }
  }
  return Mat();
}

Mat Mlp::forward(const Mat& x) const {
  if (x.rows() != cfg_.in_dim) {
    throw std::invalid_argument("Mlp.forward: input rows " + std::to_string(x.rows()) +
                                " != in_dim " + std::to_string(cfg_.in_dim));
  }
  Mat a = x;
  for (std::size_t l = 0; l < w_.size(); ++l) {
    Mat z = (w_[l] * a).colwise() + b_[l];
    if (l + 1 < w_.size()) apply_activation(z);
    a = std::move(z);
  }
  return a;
}

Mat Mlp::forward_cached(const Mat& x, MlpCache& cache) const {
  if (x.rows() != cfg_.in_dim) {
    throw std::invalid_argument("Mlp.forward_cached: bad input rows");
  }
  cache.in.assign(w_.size(), Mat());
  cache.z.assign(w_.size(), Mat());
  Mat a = x;
  for (std::size_t l = 0; l < w_.size(); ++l) {
    cache.in[l] = a;
    Mat z = (w_[l] * a).colwise() + b_[l];
    if (l + 1 < w_.size()) {
      cache.z[l] = z;
      apply_activation(z);
    }
    a = std::move(z);
  }
  return a;
}

Mat Mlp::backward(const MlpCache& cache, const Mat& dy) {
  if (cache.in.size() != w_.size()) {
    throw std::logic_error("Mlp.backward: cache does not match this net");
  }
  Mat delta = dy;
  for (std::size_t li = w_.size(); li-- > 0;) {
    if (li + 1 < w_.size()) {
      delta = delta.cwiseProduct(activation_grad(cache.z[li]));
    }
    gw_[li].noalias() += delta * cache.in[li].transpose();
    gb_[li].noalias() += delta.rowwise().sum();
    Mat prev = w_[li].transpose() * delta;
    delta = std::move(prev);
  }
  return delta;
}

void Mlp::zero_grad() {
  for (auto& g : gw_) g.setZero();
  for (auto& g : gb_) g.setZero();
}

void Mlp::adam_step(double lr, double beta1, double beta2, double eps) {
  ++t_;
  const double c1 = 1.0 - std::pow(beta1, static_cast<double>(t_));
  const double c2 = 1.0 - std::pow(beta2, static_cast<double>(t_));
  for (std::size_t l = 0; l < w_.size(); ++l) {
    mw_[l] = beta1 * mw_[l] + (1.0 - beta1) * gw_[l];
    vw_[l] = beta2 * vw_[l].array() + (1.0 - beta2) * gw_[l].array().square();
    w_[l].array() -= lr * (mw_[l].array() / c1) / ((vw_[l].array() / c2).sqrt() + eps);
    mb_[l] = beta1 * mb_[l] + (1.0 - beta1) * gb_[l];
    vb_[l] = beta2 * vb_[l].array() + (1.0 - beta2) * gb_[l].array().square();
    b_[l].array() -= lr * (mb_[l].array() / c1) / ((vb_[l].array() / c2).sqrt() + eps);
  }
}

int Mlp::param_count() const {
  int n = 0;
  for (std::size_t l = 0; l < w_.size(); ++l) {
    n += static_cast<int>(w_[l].size() + b_[l].size());
  }
  return n;
}

Vec Mlp::flat_params() const {
  Vec p(param_count());
  Eigen::Index k = 0;
  for (std::size_t l = 0; l < w_.size(); ++l) {
    p.segment(k, w_[l].size()) = Eigen::Map<const Vec>(w_[l].data(), w_[l].size());
    k += w_[l].size();
    p.segment(k, b_[l].size()) = b_[l];
    k += b_[l].size();
  }
  return p;
}

void Mlp::set_flat_params(const Vec& p) {
  if (p.size() != param_count()) {
    throw std::invalid_argument("Mlp.set_flat_params: size mismatch");
  }
  Eigen::Index k = 0;
  for (std::size_t l = 0; l < w_.size(); ++l) {
    Eigen::Map<Vec>(w_[l].data(), w_[l].size()) = p.segment(k, w_[l].size());
    k += w_[l].size();
    b_[l] = p.segment(k, b_[l].size());
    k += b_[l].size();
  }
}

Vec Mlp::flat_grads() const {
  Vec g(param_count());
  Eigen::Index k = 0;
  for (std::size_t l = 0; l < w_.size(); ++l) {
    g.segment(k, gw_[l].size()) = Eigen::Map<const Vec>(gw_[l].data(), gw_[l].size());
    k += gw_[l].size();
    g.segment(k, gb_[l].size()) = gb_[l];
    k += gb_[l].size();
  }
  return g;
}

bool Mlp::params_finite() const {
  for (std::size_t l = 0; l < w_.size(); ++l) {
    if (!w_[l].allFinite() || !b_[l].allFinite()) return false;
  }
  return true;
}

namespace {

nlohmann::json mat_to_json(const Mat& m) {
  nlohmann::json j;
  j["rows"] = m.rows();
  j["cols"] = m.cols();
  j["data"] = std::vector<double>(m.data(), m.data() + m.size());
  return j;
}

Mat mat_from_json(const nlohmann::json& j) {
  Mat m(j.at("rows").get<Eigen::Index>(), j.at("cols").get<Eigen::Index>());
  const auto data = j.at("data").get<std::vector<double>>();
  if (static_cast<Eigen::Index>(data.size()) != m.size()) {
    throw std::invalid_argument("checkpoint matrix size mismatch");
  }
  std::copy(data.begin(), data.end(), m.data());
  return m;
}

}  // namespace

nlohmann::json Mlp::to_json() const {
  nlohmann::json j;
  j["in_dim"] = cfg_.in_dim;
  j["out_dim"] = cfg_.out_dim;
  j["hidden"] = cfg_.hidden;
  j["activation"] = activation_name(cfg_.act);
  j["t"] = t_;
  for (std::size_t l = 0; l < w_.size(); ++l) {
    j["w"].push_back(mat_to_json(w_[l]));
    j["b"].push_back(std::vector<double>(b_[l].data(), b_[l].data() + b_[l].size()));
    j["mw"].push_back(mat_to_json(mw_[l]));
    j["vw"].push_back(mat_to_json(vw_[l]));
    j["mb"].push_back(std::vector<double>(mb_[l].data(), mb_[l].data() + mb_[l].size()));
    j["vb"].push_back(std::vector<double>(vb_[l].data(), vb_[l].data() + vb_[l].size()));
  }
  return j;
}

Mlp Mlp::from_json(const nlohmann::json& j) {
  MlpConfig cfg;
  cfg.in_dim = j.at("in_dim").get<int>();
  cfg.out_dim = j.at("out_dim").get<int>();
  cfg.hidden = j.at("hidden").get<std::vector<int>>();
  cfg.act = activation_from_string(j.at("activation").get<std::string>());
  Mlp net(cfg);
  net.t_ = j.at("t").get<long>();
  for (std::size_t l = 0; l < net.w_.size(); ++l) {
    net.w_[l] = mat_from_json(j.at("w").at(l));
    const auto b = j.at("b").at(l).get<std::vector<double>>();
    net.b_[l] = Eigen::Map<const Vec>(b.data(), static_cast<Eigen::Index>(b.size()));
    net.mw_[l] = mat_from_json(j.at("mw").at(l));
    net.vw_[l] = mat_from_json(j.at("vw").at(l));
    const auto mb = j.at("mb").at(l).get<std::vector<double>>();
    net.mb_[l] = Eigen::Map<const Vec>(mb.data(), static_cast<Eigen::Index>(mb.size()));
    const auto vb = j.at("vb").at(l).get<std::vector<double>>();
    net.vb_[l] = Eigen::Map<const Vec>(vb.data(), static_cast<Eigen::Index>(vb.size()));
  }
  return net;
}

}  // namespace mbrl
