#include <cmath>
#include <set>
#include <vector>

#include "doctest.h"
#include "mbrl/core/rng.hpp"
#include "mbrl/core/streams.hpp"

using namespace mbrl;

TEST_CASE("rng: identical seeds give identical sequences") {
  RngStream a(42), b(42);
  for (int i = 0; i < 100; ++i) {
    CHECK(a.next_u64() == b.next_u64());
  }
  RngStream c(42), d(42);
  for (int i = 0; i < 100; ++i) {
    CHECK(c.uniform01() == d.uniform01());
    CHECK(c.normal() == d.normal());
  }
}

TEST_CASE("rng: different seeds diverge") {
  RngStream a(1), b(2);
  int equal = 0;
  for (int i = 0; i < 64; ++i) {
    if (a.next_u64() == b.next_u64()) ++equal;
  }
  CHECK(equal == 0);
}

TEST_CASE("rng: split is pure and does not consume draws") {
  RngStream a(7);
  RngStream child1 = a.split(3);
  RngStream child2 = a.split(3);
  CHECK(child1.key() == child2.key());

  // Splitting must not perturb the parent sequence.
  RngStream b(7), c(7);
  (void)b.split(5);
  (void)b.split(9);
  for (int i = 0; i < 16; ++i) CHECK(b.next_u64() == c.next_u64());
}

TEST_CASE("rng: sibling and parent streams are distinct") {
  RngStream root(123);
  std::set<std::uint64_t> keys;
  keys.insert(root.key());
  for (std::uint64_t id = 0; id < 100; ++id) keys.insert(root.split(id).key());
  CHECK(keys.size() == 101);

  // Nested paths differ from flat ones.
  CHECK(root.split(1).split(2).key() != root.split(2).split(1).key());
  CHECK(root.split(streams::kCandidate).key() != root.split(streams::kEval).key());
}

TEST_CASE("rng: uniform01 range and moments") {
  RngStream rng(2024);
  const int n = 100000;
  double sum = 0.0, sq = 0.0;
  for (int i = 0; i < n; ++i) {
    const double u = rng.uniform01();
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
    sum += u;
    sq += u * u;
  }
  const double mean = sum / n;
  const double var = sq / n - mean * mean;
  // U(0,1): mean 1/2 (se = 1/sqrt(12 n)), var 1/12.
  CHECK(std::abs(mean - 0.5) < 3.0 / std::sqrt(12.0 * n));
  CHECK(std::abs(var - 1.0 / 12.0) < 0.002);
}

TEST_CASE("rng: uniform respects bounds") {
  RngStream rng(5);
  for (int i = 0; i < 1000; ++i) {
    const double v = rng.uniform(-2.5, 1.5);
    CHECK(v >= -2.5);
    CHECK(v < 1.5);
  }
  CHECK(rng.uniform(3.0, 3.0) == 3.0);
}

TEST_CASE("rng: normal moments") {
  RngStream rng(99);
  const int n = 100000;
  double sum = 0.0, sq = 0.0, quad = 0.0;
  for (int i = 0; i < n; ++i) {
    const double z = rng.normal();
    sum += z;
    sq += z * z;
    quad += z * z * z * z;
  }
  const double mean = sum / n;
  const double var = sq / n - mean * mean;
  CHECK(std::abs(mean) < 3.0 / std::sqrt(static_cast<double>(n)));
  CHECK(std::abs(var - 1.0) < 0.02);
  // Kurtosis of N(0,1) is 3; se of the 4th moment ~ sqrt(96/n).
  CHECK(std::abs(quad / n - 3.0) < 3.0 * std::sqrt(96.0 / n));
}

TEST_CASE("rng: uniform_int covers [0, n) evenly") {
  RngStream rng(17);
  const int n = 8;
  std::vector<int> counts(n, 0);
  const int draws = 80000;
  for (int i = 0; i < draws; ++i) {
    const std::uint64_t v = rng.uniform_int(n);
    REQUIRE(v < static_cast<std::uint64_t>(n));
    ++counts[static_cast<int>(v)];
  }
  for (int k = 0; k < n; ++k) {
    // Binomial(draws, 1/8): se ~ sqrt(draws * p * (1-p)).
    CHECK(std::abs(counts[k] - draws / n) < 5.0 * std::sqrt(draws * (1.0 / n) * (1.0 - 1.0 / n)));
  }
}

TEST_CASE("rng: sibling streams are empirically uncorrelated") {
  RngStream root(31);
  RngStream a = root.split(streams::kCandidate).split(0);
  RngStream b = root.split(streams::kCandidate).split(1);
  const int n = 20000;
  double sab = 0.0;
  for (int i = 0; i < n; ++i) {
    sab += (a.uniform01() - 0.5) * (b.uniform01() - 0.5);
  }
  // Correlation of independent uniforms: se = 1/(12 sqrt(n)).
  CHECK(std::abs(sab / n) < 4.0 / (12.0 * std::sqrt(static_cast<double>(n))));
}
