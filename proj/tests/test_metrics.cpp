#include "doctest.h"

#include <algorithm>
#include <random>
#include <stdexcept>
#include <vector>

#include "mbrl/bench/metrics.hpp"

using namespace mbrl;

namespace {

SeedSeries series(int seed, std::vector<ScorePoint> pts) {
  SeedSeries s;
  s.seed = seed;
  s.points = std::move(pts);
  return s;
}

}  // namespace

TEST_CASE("sliding window averages the trailing values") {
  const std::vector<double> xs = {1, 2, 3, 4, 5};
  CHECK(sliding_window(xs, 5) == std::vector<double>{1.0, 1.5, 2.0, 2.5, 3.0});
  CHECK(sliding_window(xs, 3) == std::vector<double>{1.0, 1.5, 2.0, 3.0, 4.0});
  CHECK(sliding_window(xs, 1) == xs);
  CHECK(sliding_window(xs, 100) == sliding_window(xs, 5));
  CHECK(sliding_window({}, 4).empty());
  CHECK_THROWS_AS(sliding_window(xs, 0), std::invalid_argument);
}

TEST_CASE("final score is mean and population std over the last window") {
  ExperimentRecord rec;
  rec.seeds.push_back(series(0, {{20000, 190.0}}));
  rec.seeds.push_back(series(1, {{20000, 210.0}}));
  const ScoreSummary s = final_score(rec);
  CHECK(s.mean == doctest::Approx(200.0).epsilon(1e-12));
  CHECK(s.stddev == doctest::Approx(10.0).epsilon(1e-12));
  CHECK(s.n_seeds == 2);
  CHECK(s.n_effective_seeds == 2);
  CHECK(s.n_points == 2);
  CHECK(s.window_steps == 5000);
}

TEST_CASE("final score window is inclusive on both ends") {
  ExperimentRecord rec;
  rec.seeds.push_back(
      series(0, {{14999, 1000.0}, {15000, 100.0}, {20000, 200.0}}));
  const ScoreSummary s = final_score(rec, 5000);
  CHECK(s.n_points == 2);
  CHECK(s.mean == doctest::Approx(150.0).epsilon(1e-12));
  CHECK(s.stddev == doctest::Approx(50.0).epsilon(1e-12));

  const ScoreSummary one = final_score(rec, 0);
  CHECK(one.n_points == 1);
  CHECK(one.mean == doctest::Approx(200.0).epsilon(1e-12));
  CHECK(one.stddev == 0.0);
}

TEST_CASE("final score skips failed seeds and flags empty windows") {
  ExperimentRecord rec;
  rec.seeds.push_back(series(0, {{100, 7.0}, {200, 9.0}}));
  SeedSeries bad = series(1, {{100, 1e9}, {200, 1e9}});
  bad.failed = true;
  bad.error = "diverged";
  rec.seeds.push_back(bad);
  rec.seeds.push_back(series(2, {}));

  const ScoreSummary s = final_score(rec, 5000);
  CHECK(s.mean == doctest::Approx(8.0).epsilon(1e-12));
  CHECK(s.n_seeds == 3);
  CHECK(s.n_effective_seeds == 1);
  CHECK(s.n_points == 2);

  ExperimentRecord empty;
  empty.seeds.push_back(bad);
  CHECK_THROWS_AS(final_score(empty), std::runtime_error);
  CHECK_THROWS_AS(final_score(ExperimentRecord{}), std::runtime_error);
  CHECK_THROWS_AS(final_score(rec, -1), std::invalid_argument);
}

TEST_CASE("final score end point comes from the longest surviving seed") {
  ExperimentRecord rec;
  rec.seeds.push_back(series(0, {{1000, 5.0}, {9000, 11.0}}));
  rec.seeds.push_back(series(1, {{8500, 13.0}}));
  const ScoreSummary s = final_score(rec, 1000);
  // end = 9000, start = 8000: includes 9000 and 8500 but not 1000.
  CHECK(s.n_points == 2);
  CHECK(s.mean == doctest::Approx(12.0).epsilon(1e-12));
}

TEST_CASE("rank table ranks per env with shared ranks on ties") {
  const std::vector<std::string> envs = {"e1", "e2"};
  const std::vector<std::string> algos = {"a", "b", "c"};
  const std::vector<RankEntry> cells = {
      {"e1", "a", 10.0}, {"e1", "b", 5.0}, {"e1", "c", 1.0},
      {"e2", "a", 10.0}, {"e2", "b", 1.0}, {"e2", "c", 5.0},
  };
  const auto rows = rank_table(envs, algos, cells);
  REQUIRE(rows.size() == 3);
  CHECK(rows[0].algo == "a");
  CHECK(rows[1].algo == "b");
  CHECK(rows[2].algo == "c");
  CHECK(rows[0].mean_rank == doctest::Approx(1.0));
  CHECK(rows[1].mean_rank == doctest::Approx(2.5));
  CHECK(rows[2].mean_rank == doctest::Approx(2.5));
  CHECK(rows[0].median_rank == doctest::Approx(1.0));
  CHECK(rows[1].median_rank == doctest::Approx(2.5));
  CHECK(rows[0].n_algos == 3);

  const std::vector<RankEntry> tied = {
      {"e1", "a", 7.0}, {"e1", "b", 7.0}, {"e1", "c", 1.0}};
  const auto trows = rank_table({"e1"}, algos, tied);
  CHECK(trows[0].mean_rank == doctest::Approx(1.5));
  CHECK(trows[1].mean_rank == doctest::Approx(1.5));
  CHECK(trows[2].mean_rank == doctest::Approx(3.0));
}

TEST_CASE("rank table gives missing algos the worst rank") {
  const std::vector<std::string> algos = {"a", "b", "c"};
  const std::vector<RankEntry> cells = {{"e1", "a", 2.0}, {"e1", "b", 1.0}};
  const auto rows = rank_table({"e1"}, algos, cells);
  CHECK(rows[0].mean_rank == doctest::Approx(1.0));
  CHECK(rows[1].mean_rank == doctest::Approx(2.0));
  CHECK(rows[2].mean_rank == doctest::Approx(3.0));
}

TEST_CASE("rank table is invariant to cell order") {
  const std::vector<std::string> envs = {"e1", "e2", "e3"};
  const std::vector<std::string> algos = {"a", "b", "c", "d"};
  std::vector<RankEntry> cells;
  std::mt19937 g(17);
  std::uniform_real_distribution<double> u(0.0, 10.0);
  for (const auto& e : envs)
    for (const auto& a : algos) cells.push_back({e, a, u(g)});
  const auto want = rank_table(envs, algos, cells);
  for (int trial = 0; trial < 5; ++trial) {
    std::shuffle(cells.begin(), cells.end(), g);
    const auto got = rank_table(envs, algos, cells);
    REQUIRE(got.size() == want.size());
    for (std::size_t i = 0; i < got.size(); ++i) {
      CHECK(got[i].algo == want[i].algo);
      CHECK(got[i].mean_rank == want[i].mean_rank);
      CHECK(got[i].median_rank == want[i].median_rank);
    }
  }
  CHECK_THROWS_AS(rank_table({}, algos, cells), std::invalid_argument);
  CHECK_THROWS_AS(rank_table(envs, {}, cells), std::invalid_argument);
}

TEST_CASE("formatting helpers produce the documented shapes") {
  CHECK(format_mean_std(167.44, 53.04) == "167.4 ± 53.0");
  CHECK(format_mean_std(-3.26, 0.0) == "-3.3 ± 0.0");
  RankRow row;
  row.mean_rank = 4.0;
  row.n_algos = 10;
  CHECK(format_rank(row) == "4.0 / 10");
}
