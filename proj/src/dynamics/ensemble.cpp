#include "mbrl/dynamics/ensemble.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "mbrl/core/streams.hpp"

namespace mbrl {

DynKind dyn_kind_from_string(const std::string& s) {
  if (s == "deterministic") return DynKind::kDeterministic;
  if (s == "probabilistic") return DynKind::kProbabilistic;
  throw std::invalid_argument("unknown dynamics kind '" + s +
                              "' (deterministic|probabilistic)");
}

std::string dyn_kind_name(DynKind k) {
  return k == DynKind::kDeterministic ? "deterministic" : "probabilistic";
}

PropagationMode propagation_from_string(const std::string& s) {
  if (s == "E") return PropagationMode::kE;
  if (s == "TS1") return PropagationMode::kTS1;
  if (s == "TSinf") return PropagationMode::kTSinf;
  if (s == "DS") return PropagationMode::kDS;
  throw std::invalid_argument("unknown propagation mode '" + s + "' (E|TS1|TSinf|DS)");
}

std::string propagation_name(PropagationMode m) {
  switch (m) {
    case PropagationMode::kE: return "E";
    case PropagationMode::kTS1: return "TS1";
    case PropagationMode::kTSinf: return "TSinf";
    case PropagationMode::kDS: return "DS";
  }
  return "?";
}

namespace {

constexpr double kLog2Pi = 1.8378770664093453;
// Losses live in normalized-target space, so anything this large means the
// optimizer ran away even if the floats are still finite.
constexpr double kDivergedLoss = 1e12;

bool diverged(double loss) { return !(loss < kDivergedLoss); }

void shuffle_indices(std::vector<std::size_t>& idx, RngStream& rng) {
  for (std::size_t i = idx.size(); i > 1; --i) {
    const std::size_t j = rng.uniform_int(i);
    std::swap(idx[i - 1], idx[j]);
  }
}

Mat gather_cols(const Mat& src, const std::vector<std::size_t>& idx, std::size_t begin,
                std::size_t end) {
  Mat out(src.rows(), static_cast<Eigen::Index>(end - begin));
  for (std::size_t i = begin; i < end; ++i) {
    out.col(static_cast<Eigen::Index>(i - begin)) =
        src.col(static_cast<Eigen::Index>(idx[i]));
  }
  return out;
}

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

double softplus(double x) { return std::log1p(std::exp(-std::abs(x))) + std::max(x, 0.0); }

}  // namespace

DynamicsEnsemble::DynamicsEnsemble(EnsembleConfig cfg, RngStream init_rng)
    : cfg_(std::move(cfg)) {
  if (cfg_.obs_dim <= 0 || cfg_.act_dim <= 0) {
    throw std::invalid_argument("DynamicsEnsemble: obs/act dims must be positive");
  }
  if (cfg_.members < 1) {
    throw std::invalid_argument("DynamicsEnsemble: members must be >= 1");
  }
  MlpConfig net;
  net.in_dim = cfg_.obs_dim + cfg_.act_dim;
  net.out_dim =
      cfg_.kind == DynKind::kProbabilistic ? 2 * cfg_.obs_dim : cfg_.obs_dim;
  net.hidden = cfg_.hidden;
  net.act = cfg_.act;
  RngStream init = init_rng.split(streams::kInit);
  for (int m = 0; m < cfg_.members; ++m) {
    members_.emplace_back(net);
    RngStream member_rng = init.split(m);
    members_.back().init(member_rng);
    Clamp c;
    c.min_lv = Vec::Constant(cfg_.obs_dim, cfg_.logvar_min_init);
    c.max_lv = Vec::Constant(cfg_.obs_dim, cfg_.logvar_max_init);
    c.m_min = Vec::Zero(cfg_.obs_dim);
    c.v_min = Vec::Zero(cfg_.obs_dim);
    c.m_max = Vec::Zero(cfg_.obs_dim);
    c.v_max = Vec::Zero(cfg_.obs_dim);
    clamps_.push_back(std::move(c));
  }
  in_norm_ = Normalizer::identity(cfg_.obs_dim + cfg_.act_dim);
  target_norm_ = Normalizer::identity(cfg_.obs_dim);
}

DynamicsEnsemble::Split DynamicsEnsemble::make_split(std::size_t n,
                                                     RngStream& rng) const {
  std::vector<std::size_t> perm(n);
  for (std::size_t i = 0; i < n; ++i) perm[i] = i;
  shuffle_indices(perm, rng);
  const std::size_t h = static_cast<std::size_t>(cfg_.holdout * static_cast<double>(n));
  Split s;
  s.holdout.assign(perm.begin(), perm.begin() + h);
  s.train.assign(perm.begin() + h, perm.end());
  if (s.train.empty()) {
    throw std::invalid_argument("dynamics training: no training samples after holdout");
  }
  return s;
}

void DynamicsEnsemble::refit_normalizers(const TransitionDataset& data) {
  const std::size_t n = data.size();
  Mat x(cfg_.obs_dim + cfg_.act_dim, n);
  Mat y(cfg_.obs_dim, n);
  for (std::size_t i = 0; i < n; ++i) {
    x.col(i).head(cfg_.obs_dim) = data[i].obs;
    x.col(i).tail(cfg_.act_dim) = data[i].act;
    y.col(i) = data[i].next_obs - data[i].obs;
  }
  in_norm_ = Normalizer::fit(x);
  target_norm_ = Normalizer::fit(y);
}

Mat DynamicsEnsemble::inputs_for(const TransitionDataset& data,
                                 const std::vector<std::size_t>& idx) const {
  Mat x(cfg_.obs_dim + cfg_.act_dim, idx.size());
  for (std::size_t i = 0; i < idx.size(); ++i) {
    x.col(i).head(cfg_.obs_dim) = data[idx[i]].obs;
    x.col(i).tail(cfg_.act_dim) = data[idx[i]].act;
  }
  return x;
}

Mat DynamicsEnsemble::targets_for(const TransitionDataset& data,
                                  const std::vector<std::size_t>& idx) const {
  Mat y(cfg_.obs_dim, idx.size());
  for (std::size_t i = 0; i < idx.size(); ++i) {
    y.col(i) = data[idx[i]].next_obs - data[idx[i]].obs;
  }
  return y;
}

void DynamicsEnsemble::soft_clamp(int member, const Mat& raw, Mat& lv, Mat& d_raw,
                                  Mat& d_max, Mat& d_min) const {
  const Clamp& c = clamps_[member];
  lv.resize(raw.rows(), raw.cols());
  d_raw.resize(raw.rows(), raw.cols());
  d_max.resize(raw.rows(), raw.cols());
  d_min.resize(raw.rows(), raw.cols());
  for (Eigen::Index j = 0; j < raw.cols(); ++j) {
    for (Eigen::Index i = 0; i < raw.rows(); ++i) {
      const double mx = c.max_lv[i], mn = c.min_lv[i];
      const double s1 = sigmoid(mx - raw(i, j));
      const double lv1 = mx - softplus(mx - raw(i, j));
      const double s2 = sigmoid(lv1 - mn);
      lv(i, j) = mn + softplus(lv1 - mn);
      d_raw(i, j) = s2 * s1;
      d_max(i, j) = s2 * (1.0 - s1);
      d_min(i, j) = 1.0 - s2;
    }
  }
}

double DynamicsEnsemble::deterministic_epoch(int member, const Mat& x, const Mat& y,
                                             int batch, RngStream& rng, bool update) {
  const std::size_t n = static_cast<std::size_t>(x.cols());
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  if (update) shuffle_indices(order, rng);
  const double dims = static_cast<double>(y.rows());
  double total_sq = 0.0;
  Mlp& net = members_[member];
  MlpCache cache;
  for (std::size_t b = 0; b < n; b += batch) {
    const std::size_t e = std::min(n, b + static_cast<std::size_t>(batch));
    Mat xb = gather_cols(x, order, b, e);
    Mat yb = gather_cols(y, order, b, e);
    const double bs = static_cast<double>(xb.cols());
    Mat out = update ? net.forward_cached(xb, cache) : net.forward(xb);
    Mat diff = out - yb;
    total_sq += diff.squaredNorm();
    if (update) {
      net.zero_grad();
      net.backward(cache, Mat(2.0 / (bs * dims) * diff));
      net.adam_step(cfg_.lr);
    }
  }
  return total_sq / (static_cast<double>(n) * dims);
}

double DynamicsEnsemble::probabilistic_epoch(int member, const Mat& x, const Mat& y,
                                             int batch, RngStream& rng, bool update) {
  const std::size_t n = static_cast<std::size_t>(x.cols());
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  if (update) shuffle_indices(order, rng);
  const Eigen::Index d = y.rows();
  double total_nll = 0.0;
  Mlp& net = members_[member];
  Clamp& c = clamps_[member];
  MlpCache cache;
  for (std::size_t b = 0; b < n; b += batch) {
    const std::size_t e = std::min(n, b + static_cast<std::size_t>(batch));
    Mat xb = gather_cols(x, order, b, e);
    Mat yb = gather_cols(y, order, b, e);
    const double bs = static_cast<double>(xb.cols());
    Mat out = update ? net.forward_cached(xb, cache) : net.forward(xb);
    Mat mu = out.topRows(d);
    Mat raw = out.bottomRows(d);
    Mat lv, d_raw, d_max, d_min;
    soft_clamp(member, raw, lv, d_raw, d_max, d_min);
    Mat inv_var = (-lv.array()).exp().matrix();
    Mat diff = mu - yb;
    Mat sq_scaled = (diff.array().square() * inv_var.array()).matrix();
    total_nll +=
        0.5 * (sq_scaled.array() + lv.array() + kLog2Pi).colwise().sum().sum();
    if (update) {
      Mat dmu = diff.cwiseProduct(inv_var) / bs;
      Mat dlv = (0.5 * (1.0 - sq_scaled.array()) / bs).matrix();
      Mat dout(2 * d, xb.cols());
      dout.topRows(d) = dmu;
      dout.bottomRows(d) = dlv.cwiseProduct(d_raw);
      net.zero_grad();
      net.backward(cache, dout);
      net.adam_step(cfg_.lr);
      // Clamp bounds get the NLL path plus the tightness regularizer.
      Vec gmax = dlv.cwiseProduct(d_max).rowwise().sum() +
                 Vec::Constant(d, cfg_.bound_reg);
      Vec gmin = dlv.cwiseProduct(d_min).rowwise().sum() -
                 Vec::Constant(d, cfg_.bound_reg);
      ++c.t;
      const double c1 = 1.0 - std::pow(0.9, static_cast<double>(c.t));
      const double c2 = 1.0 - std::pow(0.999, static_cast<double>(c.t));
      c.m_max = 0.9 * c.m_max + 0.1 * gmax;
      c.v_max = 0.999 * c.v_max.array() + 0.001 * gmax.array().square();
      c.max_lv.array() -=
          cfg_.lr * (c.m_max.array() / c1) / ((c.v_max.array() / c2).sqrt() + 1e-8);
      c.m_min = 0.9 * c.m_min + 0.1 * gmin;
      c.v_min = 0.999 * c.v_min.array() + 0.001 * gmin.array().square();
      c.min_lv.array() -=
          cfg_.lr * (c.m_min.array() / c1) / ((c.v_min.array() / c2).sqrt() + 1e-8);
    }
  }
  return total_nll / static_cast<double>(n);
}

TrainReport DynamicsEnsemble::train_deterministic(const TransitionDataset& data,
                                                  int epochs, RngStream rng) {
  if (cfg_.kind != DynKind::kDeterministic) {
    throw std::logic_error("train_deterministic requires a deterministic ensemble");
  }
  if (data.empty()) throw std::invalid_argument("train_deterministic: empty dataset");
  refit_normalizers(data);
  RngStream holdout_rng = rng.split(streams::kHoldout);
  const Split split = make_split(data.size(), holdout_rng);
  TrainReport report;
  report.epochs = epochs;
  report.holdout_size = split.holdout.size();
  RngStream members_rng = rng.split(streams::kMember);
  for (int m = 0; m < cfg_.members; ++m) {
    RngStream member_rng = members_rng.split(m);
    std::vector<std::size_t> train = split.train;
    if (cfg_.bootstrap) {
      RngStream boot = member_rng.split(streams::kInit);
      for (auto& i : train) i = split.train[boot.uniform_int(split.train.size())];
    }
    Mat x = in_norm_.normalize(inputs_for(data, train));
    Mat y = target_norm_.normalize(targets_for(data, train));
    report.train_size = train.size();
    double loss = 0.0;
    RngStream shuffles = member_rng.split(streams::kShuffle);
    for (int e = 0; e < epochs; ++e) {
      RngStream ep = shuffles.split(e);
      loss = deterministic_epoch(m, x, y, cfg_.batch, ep, true);
      if (diverged(loss) || !members_[m].params_finite()) {
        throw std::runtime_error(
            "train_deterministic diverged: member " + std::to_string(m) + " epoch " +
            std::to_string(e) + " loss " + std::to_string(loss) +
            "; lower lr or batch size");
      }
    }
    report.train_loss += loss / cfg_.members;
    if (!split.holdout.empty()) {
      Mat hx = in_norm_.normalize(inputs_for(data, split.holdout));
      Mat hy = target_norm_.normalize(targets_for(data, split.holdout));
      RngStream unused(0);
      report.holdout_loss +=
          deterministic_epoch(m, hx, hy, cfg_.batch, unused, false) / cfg_.members;
    }
  }
  return report;
}

TrainReport DynamicsEnsemble::train_probabilistic(const TransitionDataset& data,
                                                  int epochs, RngStream rng) {
  if (cfg_.kind != DynKind::kProbabilistic) {
    throw std::logic_error("train_probabilistic requires a probabilistic ensemble");
  }
  if (data.empty()) throw std::invalid_argument("train_probabilistic: empty dataset");
  refit_normalizers(data);
  RngStream holdout_rng = rng.split(streams::kHoldout);
  const Split split = make_split(data.size(), holdout_rng);
  TrainReport report;
  report.epochs = epochs;
  report.holdout_size = split.holdout.size();
  RngStream members_rng = rng.split(streams::kMember);
  for (int m = 0; m < cfg_.members; ++m) {
    RngStream member_rng = members_rng.split(m);
    std::vector<std::size_t> train = split.train;
    if (cfg_.bootstrap) {
      RngStream boot = member_rng.split(streams::kInit);
      for (auto& i : train) i = split.train[boot.uniform_int(split.train.size())];
    }
    Mat x = in_norm_.normalize(inputs_for(data, train));
    Mat y = target_norm_.normalize(targets_for(data, train));
    report.train_size = train.size();
    double loss = 0.0;
    RngStream shuffles = member_rng.split(streams::kShuffle);
    for (int e = 0; e < epochs; ++e) {
      RngStream ep = shuffles.split(e);
      loss = probabilistic_epoch(m, x, y, cfg_.batch, ep, true);
      if (diverged(loss) || !members_[m].params_finite()) {
        throw std::runtime_error(
            "train_probabilistic diverged: member " + std::to_string(m) + " epoch " +
            std::to_string(e) + " loss " + std::to_string(loss) +
            "; lower lr or batch size");
      }
    }
    report.train_loss += loss / cfg_.members;
    if (!split.holdout.empty()) {
      Mat hx = in_norm_.normalize(inputs_for(data, split.holdout));
      Mat hy = target_norm_.normalize(targets_for(data, split.holdout));
      RngStream unused(0);
      report.holdout_loss +=
          probabilistic_epoch(m, hx, hy, cfg_.batch, unused, false) / cfg_.members;
    }
  }
  return report;
}

TrainReport DynamicsEnsemble::train_multistep(const TransitionDataset& data, int epochs,
                                              RngStream rng) {
  if (cfg_.kind != DynKind::kDeterministic) {
    throw std::logic_error("train_multistep requires a deterministic ensemble");
  }
  if (data.empty()) throw std::invalid_argument("train_multistep: empty dataset");
  const int h = cfg_.ms_horizon;
  if (h < 1) throw std::invalid_argument("train_multistep: ms_horizon must be >= 1");
  refit_normalizers(data);
  const std::vector<std::size_t> starts = data.segment_starts(h);
  if (starts.empty()) {
    throw std::invalid_argument("train_multistep: no in-episode segments of length " +
                                std::to_string(h));
  }
  RngStream holdout_rng = rng.split(streams::kHoldout);
  std::vector<std::size_t> perm(starts.size());
  for (std::size_t i = 0; i < perm.size(); ++i) perm[i] = i;
  shuffle_indices(perm, holdout_rng);
  const std::size_t nh =
      static_cast<std::size_t>(cfg_.holdout * static_cast<double>(starts.size()));
  std::vector<std::size_t> holdout_starts, train_starts;
  for (std::size_t i = 0; i < nh; ++i) holdout_starts.push_back(starts[perm[i]]);
  for (std::size_t i = nh; i < perm.size(); ++i) train_starts.push_back(starts[perm[i]]);
  if (train_starts.empty()) {
    throw std::invalid_argument("train_multistep: no training segments after holdout");
  }

  const Eigen::Index d = cfg_.obs_dim;
  const Vec inv_tstd = target_norm_.std.cwiseInverse();
  const Vec inv_in_std_s = in_norm_.std.head(d).cwiseInverse();

  // Runs one pass over the given segment starts; updates parameters when
  // update is set. Returns the mean per-step normalized squared error.
  auto run_epoch = [&](int m, const std::vector<std::size_t>& segs, RngStream& ep,
                       bool update) {
    std::vector<std::size_t> order(segs.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    if (update) shuffle_indices(order, ep);
    Mlp& net = members_[m];
    double total = 0.0;
    for (std::size_t b = 0; b < order.size(); b += cfg_.batch) {
      const std::size_t e = std::min(order.size(), b + static_cast<std::size_t>(cfg_.batch));
      const Eigen::Index bs = static_cast<Eigen::Index>(e - b);
      Mat shat(d, bs);
      for (Eigen::Index i = 0; i < bs; ++i) {
        shat.col(i) = data[segs[order[b + i]]].obs;
      }
      std::vector<MlpCache> caches(h);
      std::vector<Mat> errs(h);
      const double scale = 1.0 / (static_cast<double>(h) * static_cast<double>(bs) *
                                  static_cast<double>(d));
      double batch_loss = 0.0;
      for (int j = 0; j < h; ++j) {
        Mat x(d + cfg_.act_dim, bs);
        Mat strue(d, bs);
        for (Eigen::Index i = 0; i < bs; ++i) {
          const Transition& t = data[segs[order[b + i]] + j];
          x.col(i).head(d) = shat.col(i);
          x.col(i).tail(cfg_.act_dim) = t.act;
          strue.col(i) = t.next_obs;
        }
        Mat xn = in_norm_.normalize(x);
        Mat y = update ? net.forward_cached(xn, caches[j]) : net.forward(xn);
        shat = shat + (y.array().colwise() * target_norm_.std.array()).matrix();
        shat.colwise() += target_norm_.mean;
        errs[j] = ((shat - strue).array().colwise() * inv_tstd.array()).matrix();
        batch_loss += errs[j].squaredNorm() * scale;
      }
      total += batch_loss * static_cast<double>(bs);
      if (update) {
        net.zero_grad();
        Mat g = Mat::Zero(d, bs);
        for (int j = h - 1; j >= 0; --j) {
          g += 2.0 * scale * (errs[j].array().colwise() * inv_tstd.array()).matrix();
          Mat dy = (g.array().colwise() * target_norm_.std.array()).matrix();
          Mat dx = net.backward(caches[j], dy);
          g += (dx.topRows(d).array().colwise() * inv_in_std_s.array()).matrix();
        }
        net.adam_step(cfg_.lr);
      }
    }
    return total / static_cast<double>(segs.size());
  };

  TrainReport report;
  report.epochs = epochs;
  report.train_size = train_starts.size();
  report.holdout_size = holdout_starts.size();
  RngStream members_rng = rng.split(streams::kMember);
  for (int m = 0; m < cfg_.members; ++m) {
    RngStream member_rng = members_rng.split(m);
    std::vector<std::size_t> segs = train_starts;
    if (cfg_.bootstrap) {
      RngStream boot = member_rng.split(streams::kInit);
      for (auto& s : segs) s = train_starts[boot.uniform_int(train_starts.size())];
    }
    double loss = 0.0;
    RngStream shuffles = member_rng.split(streams::kShuffle);
    for (int e = 0; e < epochs; ++e) {
      RngStream ep = shuffles.split(e);
      loss = run_epoch(m, segs, ep, true);
      if (diverged(loss) || !members_[m].params_finite()) {
        throw std::runtime_error("train_multistep diverged: member " + std::to_string(m) +
                                 " epoch " + std::to_string(e) + " loss " +
                                 std::to_string(loss) + "; lower lr or ms_horizon");
      }
    }
    report.train_loss += loss / cfg_.members;
    if (!holdout_starts.empty()) {
      RngStream unused(0);
      report.holdout_loss += run_epoch(m, holdout_starts, unused, false) / cfg_.members;
    }
  }
  return report;
}

void DynamicsEnsemble::predict(int member, const Mat& obs, const Mat& act, Mat& mean,
                               Mat* var) const {
  if (member < 0 || member >= cfg_.members) {
    throw std::invalid_argument("predict: member index out of range");
  }
  if (obs.rows() != cfg_.obs_dim || act.rows() != cfg_.act_dim ||
      obs.cols() != act.cols()) {
    throw std::invalid_argument("predict: obs/act shape mismatch");
  }
  Mat x(cfg_.obs_dim + cfg_.act_dim, obs.cols());
  x.topRows(cfg_.obs_dim) = obs;
  x.bottomRows(cfg_.act_dim) = act;
  Mat out = members_[member].forward(in_norm_.normalize(x));
  const Eigen::Index d = cfg_.obs_dim;
  if (cfg_.kind == DynKind::kDeterministic) {
    mean = obs + target_norm_.denormalize(out);
    if (var) *var = Mat::Zero(d, obs.cols());
    return;
  }
  mean = obs + target_norm_.denormalize(out.topRows(d));
  if (var) {
    Mat lv, du1, du2, du3;
    soft_clamp(member, out.bottomRows(d), lv, du1, du2, du3);
    *var = (lv.array().exp().colwise() * target_norm_.std.array().square()).matrix();
  }
}

BatchRollout DynamicsEnsemble::propagate(const Environment& env, const Vec& s0,
                                         const std::vector<Mat>& action_seqs,
                                         PropagationMode mode, int particles,
                                         RngStream rng, bool capture_states) const {
  if (action_seqs.empty()) throw std::invalid_argument("propagate: no action sequences");
  if (particles < 1) throw std::invalid_argument("propagate: particles must be >= 1");
  if (mode == PropagationMode::kE && particles != 1) {
    throw std::invalid_argument("propagate: mode E requires particles == 1");
  }
  const int c_count = static_cast<int>(action_seqs.size());
  const Eigen::Index horizon = action_seqs[0].cols();
  for (const Mat& a : action_seqs) {
    if (a.rows() != cfg_.act_dim || a.cols() != horizon) {
      throw std::invalid_argument("propagate: action sequence shape mismatch");
    }
  }
  if (s0.size() != cfg_.obs_dim) {
    throw std::invalid_argument("propagate: s0 dim mismatch");
  }
  const int k = cfg_.members;
  const Eigen::Index ncols = static_cast<Eigen::Index>(c_count) * particles;
  const Eigen::Index d = cfg_.obs_dim;
  const bool probabilistic = cfg_.kind == DynKind::kProbabilistic;
  const bool check_term = env.spec().has_termination;

  std::vector<RngStream> col_rng;
  col_rng.reserve(ncols);
  for (int c = 0; c < c_count; ++c) {
    RngStream cand = rng.split(c);
    for (int p = 0; p < particles; ++p) col_rng.push_back(cand.split(p));
  }

  BatchRollout out;
  out.candidates = c_count;
  out.particles = particles;
  out.rewards = Mat::Zero(ncols, horizon);
  out.first_term.assign(ncols, -1);

  Mat cur = s0.replicate(1, ncols);
  if (capture_states) out.states.push_back(cur);
  Mat act(cfg_.act_dim, ncols);
  Mat next(d, ncols);
  Vec sc(d), nc(d), ac(cfg_.act_dim);

  std::vector<int> member_of(ncols, 0);
  std::vector<std::vector<Eigen::Index>> groups(k);

  for (Eigen::Index t = 0; t < horizon; ++t) {
    for (Eigen::Index q = 0; q < ncols; ++q) {
      act.col(q) = action_seqs[q / particles].col(t);
    }
    switch (mode) {
      case PropagationMode::kE: {
        next.setZero();
        Mat mean;
        for (int m = 0; m < k; ++m) {
          predict(m, cur, act, mean, nullptr);
          next += mean;
        }
        next /= static_cast<double>(k);
        break;
      }
      case PropagationMode::kTS1:
      case PropagationMode::kTSinf: {
        for (Eigen::Index q = 0; q < ncols; ++q) {
          member_of[q] = mode == PropagationMode::kTS1
                             ? static_cast<int>(col_rng[q].uniform_int(k))
                             : static_cast<int>(q % particles) % k;
        }
        for (auto& g : groups) g.clear();
        for (Eigen::Index q = 0; q < ncols; ++q) groups[member_of[q]].push_back(q);
        for (int m = 0; m < k; ++m) {
          if (groups[m].empty()) continue;
          Mat o(d, groups[m].size()), a(cfg_.act_dim, groups[m].size());
          for (std::size_t i = 0; i < groups[m].size(); ++i) {
            o.col(i) = cur.col(groups[m][i]);
            a.col(i) = act.col(groups[m][i]);
          }
          Mat mean, var;
          predict(m, o, a, mean, probabilistic ? &var : nullptr);
          for (std::size_t i = 0; i < groups[m].size(); ++i) {
            next.col(groups[m][i]) = mean.col(i);
          }
          if (probabilistic) {
            for (std::size_t i = 0; i < groups[m].size(); ++i) {
              const Eigen::Index q = groups[m][i];
              for (Eigen::Index r = 0; r < d; ++r) {
                next(r, q) += std::sqrt(var(r, i)) * col_rng[q].normal();
              }
            }
          }
        }
        break;
      }
      case PropagationMode::kDS: {
        Mat mu_sum = Mat::Zero(d, ncols);
        Mat second = Mat::Zero(d, ncols);  // E[var + mu^2]
        Mat mean, var;
        for (int m = 0; m < k; ++m) {
          predict(m, cur, act, mean, probabilistic ? &var : nullptr);
          mu_sum += mean;
          second += mean.array().square().matrix();
          if (probabilistic) second += var;
        }
        Mat mu_star = mu_sum / static_cast<double>(k);
        Mat var_star =
            (second / static_cast<double>(k) - mu_star.array().square().matrix())
                .cwiseMax(0.0);
        for (Eigen::Index q = 0; q < ncols; ++q) {
          for (Eigen::Index r = 0; r < d; ++r) {
            next(r, q) = mu_star(r, q) + std::sqrt(var_star(r, q)) * col_rng[q].normal();
          }
        }
        break;
      }
    }
    for (Eigen::Index q = 0; q < ncols; ++q) {
      sc = cur.col(q);
      ac = act.col(q);
      nc = next.col(q);
      out.rewards(q, t) = env.reward(sc, ac, nc);
      if (check_term && out.first_term[q] < 0 && env.terminated(nc)) {
        out.first_term[q] = static_cast<int>(t);
      }
    }
    cur = next;
    if (capture_states) out.states.push_back(cur);
  }
  return out;
}

nlohmann::json DynamicsEnsemble::to_json() const {
  nlohmann::json j;
  j["obs_dim"] = cfg_.obs_dim;
  j["act_dim"] = cfg_.act_dim;
  j["members"] = cfg_.members;
  j["kind"] = dyn_kind_name(cfg_.kind);
  j["hidden"] = cfg_.hidden;
  j["activation"] = activation_name(cfg_.act);
  j["lr"] = cfg_.lr;
  j["batch"] = cfg_.batch;
  j["holdout"] = cfg_.holdout;
  j["bootstrap"] = cfg_.bootstrap;
  j["ms_horizon"] = cfg_.ms_horizon;
  j["logvar_min_init"] = cfg_.logvar_min_init;
  j["logvar_max_init"] = cfg_.logvar_max_init;
  j["bound_reg"] = cfg_.bound_reg;
  auto vec_json = [](const Vec& v) {
    return std::vector<double>(v.data(), v.data() + v.size());
  };
  j["in_mean"] = vec_json(in_norm_.mean);
  j["in_std"] = vec_json(in_norm_.std);
  j["target_mean"] = vec_json(target_norm_.mean);
  j["target_std"] = vec_json(target_norm_.std);
  for (int m = 0; m < cfg_.members; ++m) {
    j["nets"].push_back(members_[m].to_json());
    nlohmann::json c;
    c["min_lv"] = vec_json(clamps_[m].min_lv);
    c["max_lv"] = vec_json(clamps_[m].max_lv);
    c["m_min"] = vec_json(clamps_[m].m_min);
    c["v_min"] = vec_json(clamps_[m].v_min);
    c["m_max"] = vec_json(clamps_[m].m_max);
    c["v_max"] = vec_json(clamps_[m].v_max);
    c["t"] = clamps_[m].t;
    j["clamps"].push_back(c);
  }
  return j;
}

DynamicsEnsemble DynamicsEnsemble::from_json(const nlohmann::json& j) {
  EnsembleConfig cfg;
  cfg.obs_dim = j.at("obs_dim").get<int>();
  cfg.act_dim = j.at("act_dim").get<int>();
  cfg.members = j.at("members").get<int>();
  cfg.kind = dyn_kind_from_string(j.at("kind").get<std::string>());
  cfg.hidden = j.at("hidden").get<std::vector<int>>();
  cfg.act = activation_from_string(j.at("activation").get<std::string>());
  cfg.lr = j.at("lr").get<double>();
  cfg.batch = j.at("batch").get<int>();
  cfg.holdout = j.at("holdout").get<double>();
  cfg.bootstrap = j.at("bootstrap").get<bool>();
  cfg.ms_horizon = j.at("ms_horizon").get<int>();
  cfg.logvar_min_init = j.at("logvar_min_init").get<double>();
  cfg.logvar_max_init = j.at("logvar_max_init").get<double>();
  cfg.bound_reg = j.at("bound_reg").get<double>();
  RngStream dummy(0);
  DynamicsEnsemble ens(cfg, dummy);
  auto vec_from = [](const nlohmann::json& a) {
    const auto v = a.get<std::vector<double>>();
    return Vec(Eigen::Map<const Vec>(v.data(), static_cast<Eigen::Index>(v.size())));
  };
  ens.in_norm_.mean = vec_from(j.at("in_mean"));
  ens.in_norm_.std = vec_from(j.at("in_std"));
  ens.target_norm_.mean = vec_from(j.at("target_mean"));
  ens.target_norm_.std = vec_from(j.at("target_std"));
  ens.members_.clear();
  for (int m = 0; m < cfg.members; ++m) {
    ens.members_.push_back(Mlp::from_json(j.at("nets").at(m)));
    const auto& c = j.at("clamps").at(m);
    ens.clamps_[m].min_lv = vec_from(c.at("min_lv"));
    ens.clamps_[m].max_lv = vec_from(c.at("max_lv"));
    ens.clamps_[m].m_min = vec_from(c.at("m_min"));
    ens.clamps_[m].v_min = vec_from(c.at("v_min"));
    ens.clamps_[m].m_max = vec_from(c.at("m_max"));
    ens.clamps_[m].v_max = vec_from(c.at("v_max"));
    ens.clamps_[m].t = c.at("t").get<long>();
  }
  return ens;
}

}  // namespace mbrl
