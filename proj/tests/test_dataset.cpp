#include "doctest.h"

#include <sstream>
#include <stdexcept>

#include "helpers.hpp"
#include "mbrl/core/rng.hpp"
#include "mbrl/dynamics/dataset.hpp"
#include "mbrl/envs/env.hpp"

using namespace mbrl;

namespace {

// Two pendulum episodes of the given lengths, distinct resets.
TransitionDataset sample_dataset(const std::vector<int>& episode_lengths) {
  auto env = make_env("pendulum");
  RngStream rng(51);
  TransitionDataset data;
  for (int len : episode_lengths) {
    data.begin_episode();
    Vec obs;
    env->reset(rng, obs);
    for (int t = 0; t < len; ++t) {
      Vec act = Vec::Constant(1, rng.uniform(-2.0, 2.0));
      Transition tr;
      tr.obs = obs;
      tr.act = act;
      env->step(obs, act, tr.next_obs);
      tr.reward = env->reward(obs, act, tr.next_obs);
      tr.terminated = false;
      obs = tr.next_obs;
      data.add(std::move(tr));
    }
  }
  return data;
}

}  // namespace

TEST_CASE("dataset tracks size, order, and episode starts") {
  TransitionDataset data = sample_dataset({3, 2});
  CHECK(data.size() == 5);
  CHECK_FALSE(data.empty());
  CHECK(data.episode_starts() == std::vector<std::size_t>{0, 3});

  // Consecutive transitions inside an episode chain (next_obs becomes obs).
  CHECK(data[1].obs == data[0].next_obs);
  CHECK(data[2].obs == data[1].next_obs);
  CHECK(data[4].obs == data[3].next_obs);
  // Across the boundary they do not.
  CHECK(data[3].obs != data[2].next_obs);

  TransitionDataset empty;
  CHECK(empty.empty());
  empty.begin_episode();
  empty.begin_episode();
  Transition t = data[0];
  empty.add(t);
  CHECK(empty.episode_starts() == std::vector<std::size_t>{0});
}

TEST_CASE("segment_starts yields every in-episode window and nothing else") {
  TransitionDataset data = sample_dataset({5, 2, 4});

  CHECK(data.segment_starts(1).size() == data.size());

  // Episode layout: [0,5), [5,7), [7,11). Windows of 3 fit at 0,1,2 and 7,8.
  CHECK(data.segment_starts(3) == std::vector<std::size_t>{0, 1, 2, 7, 8});
  // Windows of 4: 0,1 and 7. The length-2 episode contributes nothing.
  CHECK(data.segment_starts(4) == std::vector<std::size_t>{0, 1, 7});
  CHECK(data.segment_starts(5) == std::vector<std::size_t>{0});
  CHECK(data.segment_starts(6).empty());
  CHECK_THROWS_AS(data.segment_starts(0), std::invalid_argument);
}

TEST_CASE("csv export and import round-trip exactly, including episode boundaries") {
  TransitionDataset data = sample_dataset({4, 3});
  std::stringstream ss;
  data.export_csv(ss);

  const std::string text = ss.str();
  CHECK(text.substr(0, text.find('\n')) ==
        "s_0,s_1,s_2,a_0,ns_0,ns_1,ns_2,reward,terminated");

  TransitionDataset back = TransitionDataset::import_csv(ss, 3, 1);
  REQUIRE(back.size() == data.size());
  CHECK(back.episode_starts() == data.episode_starts());
  for (std::size_t i = 0; i < data.size(); ++i) {
    CAPTURE(i);
    CHECK(back[i].obs == data[i].obs);
    CHECK(back[i].act == data[i].act);
    CHECK(back[i].next_obs == data[i].next_obs);
    CHECK(back[i].reward == data[i].reward);
    CHECK(back[i].terminated == data[i].terminated);
  }

  const std::string dir = mbrl::test::temp_dir("dataset");
  const std::string path = dir + "/data.csv";
  data.export_csv_file(path);
  TransitionDataset from_file = TransitionDataset::import_csv_file(path, 3, 1);
  CHECK(from_file.size() == data.size());
  CHECK(from_file.episode_starts() == data.episode_starts());

  TransitionDataset empty;
  CHECK_THROWS(empty.export_csv(ss));
  CHECK_THROWS(TransitionDataset::import_csv_file(dir + "/missing.csv", 3, 1));
}

TEST_CASE("normalizer fits per-dimension moments with a std floor") {
  Mat x(2, 4);
  x << 1.0, 2.0, 3.0, 4.0,
       5.0, 5.0, 5.0, 5.0;
  Normalizer norm = Normalizer::fit(x);
  CHECK(norm.mean[0] == doctest::Approx(2.5).epsilon(1e-12));
  CHECK(norm.mean[1] == doctest::Approx(5.0).epsilon(1e-12));
  // Population std of {1,2,3,4}.
  CHECK(norm.std[0] == doctest::Approx(std::sqrt(1.25)).epsilon(1e-12));
  // Constant dimension hits the floor instead of zero.
  CHECK(norm.std[1] > 0.0);
  CHECK(norm.std[1] <= 1e-5);

  const Mat xn = norm.normalize(x);
  CHECK(std::abs(xn.row(0).mean()) < 1e-12);
  CHECK(xn.row(1).cwiseAbs().maxCoeff() < 1e-9);
  CHECK(test::rel_err(Vec(norm.denormalize(xn).reshaped()), Vec(x.reshaped())) < 1e-12);
}

TEST_CASE("identity normalizer is a no-op") {
  Normalizer id = Normalizer::identity(3);
  RngStream rng(61);
  Mat x(3, 5);
  for (int i = 0; i < x.size(); ++i) x.data()[i] = rng.uniform(-2.0, 2.0);
  CHECK(id.normalize(x) == x);
  CHECK(id.denormalize(x) == x);
}
