#include "mbrl/dynamics/dataset.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace mbrl {

void TransitionDataset::begin_episode() {
  if (!episode_starts_.empty() && episode_starts_.back() == transitions_.size()) {
    return;  // empty episode so far; keep one marker
  }
  episode_starts_.push_back(transitions_.size());
}

void TransitionDataset::add(Transition t) {
  if (episode_starts_.empty()) episode_starts_.push_back(0);
  transitions_.push_back(std::move(t));
}

std::vector<std::size_t> TransitionDataset::segment_starts(int horizon) const {
  if (horizon < 1) throw std::invalid_argument("segment_starts: horizon must be >= 1");
  std::vector<std::size_t> starts;
  for (std::size_t e = 0; e < episode_starts_.size(); ++e) {
    const std::size_t begin = episode_starts_[e];
    const std::size_t end =
        (e + 1 < episode_starts_.size()) ? episode_starts_[e + 1] : transitions_.size();
    if (end - begin < static_cast<std::size_t>(horizon)) continue;
    for (std::size_t i = begin; i + horizon <= end; ++i) starts.push_back(i);
  }
  return starts;
}

namespace {

void write_double(std::ostream& os, double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  os << buf;
}

}  // namespace

void TransitionDataset::export_csv(std::ostream& os) const {
  if (transitions_.empty()) {
    throw std::invalid_argument("export_csv: empty dataset");
  }
  const Eigen::Index n = transitions_[0].obs.size();
  const Eigen::Index m = transitions_[0].act.size();
  for (Eigen::Index i = 0; i < n; ++i) os << "s_" << i << ",";
  for (Eigen::Index i = 0; i < m; ++i) os << "a_" << i << ",";
  for (Eigen::Index i = 0; i < n; ++i) os << "ns_" << i << ",";
  os << "reward,terminated\n";
  for (const Transition& t : transitions_) {
    for (Eigen::Index i = 0; i < n; ++i) {
      write_double(os, t.obs[i]);
      os << ",";
    }
    for (Eigen::Index i = 0; i < m; ++i) {
      write_double(os, t.act[i]);
      os << ",";
    }
    for (Eigen::Index i = 0; i < n; ++i) {
      write_double(os, t.next_obs[i]);
      os << ",";
    }
    write_double(os, t.reward);
    os << "," << (t.terminated ? 1 : 0) << "\n";
  }
}

void TransitionDataset::export_csv_file(const std::string& path) const {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("export_csv: cannot open " + path);
  export_csv(f);
}

TransitionDataset TransitionDataset::import_csv(std::istream& is, int obs_dim,
                                                int act_dim) {
  std::string line;
  if (!std::getline(is, line)) throw std::invalid_argument("import_csv: empty input");
  {
    std::ostringstream expect;
    for (int i = 0; i < obs_dim; ++i) expect << "s_" << i << ",";
    for (int i = 0; i < act_dim; ++i) expect << "a_" << i << ",";
    for (int i = 0; i < obs_dim; ++i) expect << "ns_" << i << ",";
    expect << "reward,terminated";
    if (line != expect.str()) {
      throw std::invalid_argument("import_csv: header mismatch, expected '" +
                                  expect.str() + "' got '" + line + "'");
    }
  }
  TransitionDataset data;
  const int fields = 2 * obs_dim + act_dim + 2;
  std::size_t row = 1;
  while (std::getline(is, line)) {
    ++row;
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::vector<double> vals;
    std::string cell;
    while (std::getline(ss, cell, ',')) vals.push_back(std::stod(cell));
    if (static_cast<int>(vals.size()) != fields) {
      throw std::invalid_argument("import_csv: row " + std::to_string(row) + " has " +
                                  std::to_string(vals.size()) + " fields, expected " +
                                  std::to_string(fields));
    }
    Transition t;
    t.obs = Eigen::Map<const Vec>(vals.data(), obs_dim);
    t.act = Eigen::Map<const Vec>(vals.data() + obs_dim, act_dim);
    t.next_obs = Eigen::Map<const Vec>(vals.data() + obs_dim + act_dim, obs_dim);
    t.reward = vals[fields - 2];
    t.terminated = vals[fields - 1] != 0.0;
    const bool new_episode =
        data.transitions_.empty() ||
        (data.transitions_.back().next_obs - t.obs).cwiseAbs().maxCoeff() > 0.0 ||
        data.transitions_.back().terminated;
    if (new_episode) data.begin_episode();
    data.add(std::move(t));
  }
  return data;
}

TransitionDataset TransitionDataset::import_csv_file(const std::string& path,
                                                     int obs_dim, int act_dim) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("import_csv: cannot open " + path);
  return import_csv(f, obs_dim, act_dim);
}

Normalizer Normalizer::fit(const Mat& x, double eps) {
  if (x.cols() == 0) throw std::invalid_argument("Normalizer.fit: no samples");
  Normalizer n;
  n.mean = x.rowwise().mean();
  Mat centered = x.colwise() - n.mean;
  n.std = (centered.array().square().rowwise().mean()).sqrt();
  n.std = n.std.cwiseMax(eps);
  return n;
}

Normalizer Normalizer::identity(int dim) {
  Normalizer n;
  n.mean = Vec::Zero(dim);
  n.std = Vec::Ones(dim);
  return n;
}

Mat Normalizer::normalize(const Mat& x) const {
  return (x.colwise() - mean).array().colwise() / std.array();
}

Mat Normalizer::denormalize(const Mat& xn) const {
  return (xn.array().colwise() * std.array()).colwise() + mean.array();
}

}  // namespace mbrl
