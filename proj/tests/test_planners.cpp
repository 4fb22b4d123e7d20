#include "doctest.h"

#include <cmath>
#include <functional>
#include <stdexcept>
#include <vector>

#include "helpers.hpp"
#include "mbrl/core/rng.hpp"
#include "mbrl/core/streams.hpp"
#include "mbrl/planners/shooting.hpp"

using namespace mbrl;

namespace {

EnvSpec fake_spec(int act_dim = 1, double bound = 1.0) {
  EnvSpec sp;
  sp.name = "fake";
  sp.obs_dim = 2;
  sp.act_dim = act_dim;
  sp.act_low = Vec::Constant(act_dim, -bound);
  sp.act_high = Vec::Constant(act_dim, bound);
  sp.horizon = 100;
  return sp;
}

// Scores candidates with an arbitrary function and remembers what it saw.
class FakeBackend : public RolloutBackend {
 public:
  FakeBackend(EnvSpec spec, std::function<double(const Mat&, int)> score)
      : spec_(std::move(spec)), score_(std::move(score)) {}

  Vec evaluate(const Vec&, const std::vector<Mat>& candidates,
               RngStream) const override {
    Vec out(candidates.size());
    for (std::size_t c = 0; c < candidates.size(); ++c) {
      out[c] = score_(candidates[c], static_cast<int>(c));
      seen_.push_back(candidates[c]);
    }
    return out;
  }
  const EnvSpec& spec() const override { return spec_; }

  mutable std::vector<Mat> seen_;

 private:
  EnvSpec spec_;
  std::function<double(const Mat&, int)> score_;
};

// The documented RS sampling layout: candidate c draws from
// rng.split(kCandidate).split(c), uniform over bounds, time-major.
Mat mirror_rs_candidate(const EnvSpec& sp, int horizon, RngStream rng, int c) {
  RngStream cr = rng.split(streams::kCandidate).split(c);
  Mat seq(sp.act_dim, horizon);
  for (int t = 0; t < horizon; ++t) {
    for (int d = 0; d < sp.act_dim; ++d) {
      seq(d, t) = sp.act_low[d] + (sp.act_high[d] - sp.act_low[d]) * cr.uniform01();
    }
  }
  return seq;
}

}  // namespace

TEST_CASE("plan_rs picks the best-scoring candidate") {
  FakeBackend backend(fake_spec(), [](const Mat&, int c) {
    const double scores[] = {3.0, 5.0, 1.0, 4.0};
    return scores[c];
  });
  RsConfig cfg{4, 6};
  RsResult res = plan_rs(backend, Vec::Zero(2), cfg, RngStream(1));
  CHECK(res.index == 1);
  CHECK(res.value == 5.0);
  CHECK(res.actions == backend.seen_[1]);
}

TEST_CASE("plan_rs breaks ties toward the lowest candidate index") {
  FakeBackend backend(fake_spec(), [](const Mat&, int c) {
    return c == 0 || c == 2 ? 7.0 : 1.0;
  });
  RsConfig cfg{5, 4};
  RsResult res = plan_rs(backend, Vec::Zero(2), cfg, RngStream(2));
  CHECK(res.index == 0);

  FakeBackend flat(fake_spec(), [](const Mat&, int) { return 0.0; });
  CHECK(plan_rs(flat, Vec::Zero(2), cfg, RngStream(3)).index == 0);
}

TEST_CASE("plan_rs with population 1 returns the one sampled sequence") {
  FakeBackend backend(fake_spec(2, 1.5), [](const Mat&, int) { return 0.0; });
  RsConfig cfg{1, 5};
  RsResult res = plan_rs(backend, Vec::Zero(2), cfg, RngStream(9));
  CHECK(res.index == 0);
  CHECK(res.actions == mirror_rs_candidate(backend.spec(), 5, RngStream(9), 0));
}

TEST_CASE("plan_rs samples i.i.d. uniform within bounds") {
  FakeBackend backend(fake_spec(2, 0.7), [](const Mat&, int) { return 0.0; });
  RsConfig cfg{40, 8};
  plan_rs(backend, Vec::Zero(2), cfg, RngStream(4));
  REQUIRE(backend.seen_.size() == 40);
  for (int c = 0; c < 40; ++c) {
    CHECK(backend.seen_[c].minCoeff() >= -0.7);
    CHECK(backend.seen_[c].maxCoeff() <= 0.7);
    CHECK(backend.seen_[c] == mirror_rs_candidate(backend.spec(), 8, RngStream(4), c));
  }
}

TEST_CASE("plan_rs is deterministic in its stream") {
  auto by_sum = [](const Mat& m, int) { return m.sum(); };
  FakeBackend a(fake_spec(), by_sum), b(fake_spec(), by_sum);
  RsConfig cfg{30, 10};
  RsResult ra = plan_rs(a, Vec::Zero(2), cfg, RngStream(7));
  RsResult rb = plan_rs(b, Vec::Zero(2), cfg, RngStream(7));
  CHECK(ra.actions == rb.actions);
  CHECK(ra.index == rb.index);
  CHECK(ra.value == rb.value);
  RsResult rc = plan_rs(a, Vec::Zero(2), cfg, RngStream(8));
  CHECK(ra.actions != rc.actions);
}

TEST_CASE("plan_rs argmax is invariant under strictly increasing score transforms") {
  auto raw = [](const Mat& m, int) { return m.sum(); };
  auto warped = [](const Mat& m, int) { return std::exp(0.5 * m.sum()) + 7.0; };
  FakeBackend a(fake_spec(), raw), b(fake_spec(), warped);
  RsConfig cfg{60, 5};
  for (uint64_t seed = 0; seed < 5; ++seed) {
    CHECK(plan_rs(a, Vec::Zero(2), cfg, RngStream(seed)).index ==
          plan_rs(b, Vec::Zero(2), cfg, RngStream(seed)).index);
  }
}

TEST_CASE("plan_rs validates its inputs") {
  FakeBackend backend(fake_spec(), [](const Mat&, int) { return 0.0; });
  CHECK_THROWS_AS(plan_rs(backend, Vec::Zero(2), RsConfig{0, 5}, RngStream(1)),
                  std::invalid_argument);
  CHECK_THROWS_AS(plan_rs(backend, Vec::Zero(2), RsConfig{5, 0}, RngStream(1)),
                  std::invalid_argument);
  CHECK_THROWS_AS(plan_rs(backend, Vec::Zero(3), RsConfig{5, 5}, RngStream(1)),
                  std::invalid_argument);
}

TEST_CASE("plan_cem finds the optimum of a one-step quadratic") {
  FakeBackend backend(fake_spec(), [](const Mat& m, int) {
    const double a = m(0, 0);
    return -(a - 0.3) * (a - 0.3);
  });
  CemConfig cfg;
  cfg.population = 300;
  cfg.elites = 30;
  cfg.iterations = 8;
  cfg.horizon = 1;
  for (uint64_t seed = 1; seed <= 3; ++seed) {
    CemResult res = plan_cem(backend, Vec::Zero(2), cfg, RngStream(seed));
    CHECK(std::abs(res.mean(0, 0) - 0.3) < 0.05);
    CHECK(std::abs(res.incumbent(0, 0) - 0.3) < 0.05);
  }
}

TEST_CASE("cem incumbent value never decreases across iterations") {
  FakeBackend backend(fake_spec(), [](const Mat& m, int) { return m.sum(); });
  CemConfig cfg;
  cfg.population = 50;
  cfg.elites = 10;
  cfg.iterations = 6;
  cfg.horizon = 4;
  CemResult res = plan_cem(backend, Vec::Zero(2), cfg, RngStream(5));
  REQUIRE(res.iter_best.size() == 6);
  for (std::size_t i = 1; i < res.iter_best.size(); ++i) {
    CHECK(res.iter_best[i] >= res.iter_best[i - 1]);
  }
  CHECK(res.incumbent_value == res.iter_best.back());
  // The incumbent reproduces its reported value under the same backend.
  CHECK(res.incumbent.sum() == res.incumbent_value);
}

TEST_CASE("cem with elites = population and alpha 1 refits to the sample mean") {
  FakeBackend backend(fake_spec(), [](const Mat&, int) { return 0.0; });
  CemConfig cfg;
  cfg.population = 25;
  cfg.elites = 25;
  cfg.iterations = 1;
  cfg.alpha = 1.0;
  cfg.horizon = 3;
  CemResult res = plan_cem(backend, Vec::Zero(2), cfg, RngStream(6));
  REQUIRE(backend.seen_.size() == 25);
  Mat mean = Mat::Zero(1, 3);
  for (const Mat& c : backend.seen_) mean += c;
  mean /= 25.0;
  CHECK(test::rel_err(Vec(res.mean.reshaped()), Vec(mean.reshaped())) < 1e-12);
}

TEST_CASE("cem samples stay within bounds and warm starts are clamped") {
  FakeBackend backend(fake_spec(1, 0.5), [](const Mat& m, int) { return m.sum(); });
  CemConfig cfg;
  cfg.population = 40;
  cfg.elites = 8;
  cfg.iterations = 3;
  cfg.horizon = 5;
  Mat warm = Mat::Constant(1, 5, 10.0);
  CemResult res = plan_cem(backend, Vec::Zero(2), cfg, RngStream(7), warm);
  for (const Mat& c : backend.seen_) {
    CHECK(c.minCoeff() >= -0.5);
    CHECK(c.maxCoeff() <= 0.5);
  }
  CHECK(res.mean.maxCoeff() <= 0.5);
  CHECK(res.mean.minCoeff() >= -0.5);
}

TEST_CASE("cem survives a zero sampling std via the floor") {
  FakeBackend backend(fake_spec(), [](const Mat& m, int) { return -m.squaredNorm(); });
  CemConfig cfg;
  cfg.population = 20;
  cfg.elites = 5;
  cfg.iterations = 3;
  cfg.init_std_frac = 0.0;
  cfg.horizon = 4;
  CemResult res = plan_cem(backend, Vec::Zero(2), cfg, RngStream(8));
  CHECK(res.mean.allFinite());
  CHECK(res.incumbent.allFinite());
}

TEST_CASE("cem is deterministic in its stream") {
  auto score = [](const Mat& m, int) { return -(m.array() - 0.2).square().sum(); };
  FakeBackend a(fake_spec(), score), b(fake_spec(), score);
  CemConfig cfg;
  cfg.population = 30;
  cfg.elites = 6;
  cfg.iterations = 4;
  cfg.horizon = 6;
  CemResult ra = plan_cem(a, Vec::Zero(2), cfg, RngStream(11));
  CemResult rb = plan_cem(b, Vec::Zero(2), cfg, RngStream(11));
  CHECK(ra.mean == rb.mean);
  CHECK(ra.incumbent == rb.incumbent);
  CHECK(ra.iter_best == rb.iter_best);
}

TEST_CASE("plan_cem validates its config") {
  FakeBackend backend(fake_spec(), [](const Mat&, int) { return 0.0; });
  CemConfig cfg;
  cfg.population = 10;
  cfg.horizon = 3;

  CemConfig bad = cfg;
  bad.elites = 11;
  CHECK_THROWS_AS(plan_cem(backend, Vec::Zero(2), bad, RngStream(1)),
                  std::invalid_argument);
  bad = cfg;
  bad.elites = 0;
  CHECK_THROWS_AS(plan_cem(backend, Vec::Zero(2), bad, RngStream(1)),
                  std::invalid_argument);
  bad = cfg;
  bad.iterations = 0;
  CHECK_THROWS_AS(plan_cem(backend, Vec::Zero(2), bad, RngStream(1)),
                  std::invalid_argument);
  bad = cfg;
  bad.alpha = 1.5;
  CHECK_THROWS_AS(plan_cem(backend, Vec::Zero(2), bad, RngStream(1)),
                  std::invalid_argument);
  Mat warm = Mat::Zero(1, 4);
  CHECK_THROWS_AS(plan_cem(backend, Vec::Zero(2), cfg, RngStream(1), warm),
                  std::invalid_argument);
}
