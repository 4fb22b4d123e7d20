#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "mbrl/core/types.hpp"

namespace mbrl {

// Transition store with episode boundaries so multi-step training segments
// never cross episodes.
class TransitionDataset {
 public:
  void begin_episode();
  void add(Transition t);

  std::size_t size() const { return transitions_.size(); }
  bool empty() const { return transitions_.empty(); }
  const Transition& operator[](std::size_t i) const { return transitions_[i]; }
  const std::vector<std::size_t>& episode_starts() const { return episode_starts_; }

  // Start indices of every in-episode window of `horizon` consecutive
  // transitions.
  std::vector<std::size_t> segment_starts(int horizon) const;

  // Header: s_0..s_n,a_0..a_m,ns_0..ns_n,reward,terminated. Import
  // reconstructs episode boundaries where a row's s differs from the
  // previous row's ns.
  void export_csv(std::ostream& os) const;
  void export_csv_file(const std::string& path) const;
  static TransitionDataset import_csv(std::istream& is, int obs_dim, int act_dim);
  static TransitionDataset import_csv_file(const std::string& path, int obs_dim,
                                           int act_dim);

 private:
  std::vector<Transition> transitions_;
  std::vector<std::size_t> episode_starts_;
};

// Per-dimension mean/std scaling with a floor on std so constant inputs stay
// finite. Columns are samples.
struct Normalizer {
  Vec mean;
  Vec std;

  static Normalizer fit(const Mat& x, double eps = 1e-6);
  static Normalizer identity(int dim);

  Mat normalize(const Mat& x) const;
  Mat denormalize(const Mat& xn) const;
};

}  // namespace mbrl
