#include "doctest.h"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "helpers.hpp"
#include "mbrl/core/rng.hpp"
#include "mbrl/envs/env.hpp"

using namespace mbrl;

namespace {

Vec random_obs(const Environment& env, RngStream& rng) {
  Vec obs;
  env.reset(rng, obs);
  return obs;
}

Vec random_action(const Environment& env, RngStream& rng) {
  const auto& spec = env.spec();
  Vec a(spec.act_dim);
  for (int i = 0; i < spec.act_dim; ++i) {
    a[i] = rng.uniform(spec.act_low[i], spec.act_high[i]);
  }
  return a;
}

// A synthetic in-range state reached by walking a few random steps from reset,
// so formula checks see velocities and angles away from the init region.
Vec walked_obs(const Environment& env, RngStream& rng, int steps = 8) {
  Vec obs = random_obs(env, rng);
  Vec next;
  for (int t = 0; t < steps; ++t) {
    env.step(obs, random_action(env, rng), next);
    obs = next;
  }
  return obs;
}

}  // namespace

TEST_CASE("env registry exposes the six environments with fixed specs") {
  struct Row {
    const char* name;
    int obs_dim;
    int act_dim;
    int horizon;
    bool has_term;
    double act_high;
  };
  const Row rows[] = {
      {"pendulum", 3, 1, 200, false, 2.0},  {"cartpole", 4, 1, 200, false, 1.0},
      {"cartpole_et", 4, 1, 200, true, 1.0}, {"acrobot", 6, 1, 200, false, 1.0},
      {"mountaincar", 2, 1, 200, false, 1.0}, {"reacher2d", 11, 2, 50, false, 1.0},
  };
  const auto names = env_names();
  REQUIRE(names.size() == 6);
  for (const auto& row : rows) {
    CAPTURE(row.name);
    auto env = make_env(row.name);
    const auto& spec = env->spec();
    CHECK(spec.name == row.name);
    CHECK(spec.obs_dim == row.obs_dim);
    CHECK(spec.act_dim == row.act_dim);
    CHECK(spec.horizon == row.horizon);
    CHECK(spec.has_termination == row.has_term);
    REQUIRE(spec.act_low.size() == row.act_dim);
    REQUIRE(spec.act_high.size() == row.act_dim);
    for (int i = 0; i < row.act_dim; ++i) {
      CHECK(spec.act_low[i] == -row.act_high);
      CHECK(spec.act_high[i] == row.act_high);
    }
  }
}

TEST_CASE("unknown env name and unknown params are rejected") {
  CHECK_THROWS_WITH_AS(make_env("cart_pole"), doctest::Contains("unknown env"),
                       std::invalid_argument);
  CHECK_THROWS_WITH_AS(make_env("pendulum", {{"gravity", 9.8}}),
                       doctest::Contains("gravity"), std::invalid_argument);
  CHECK_THROWS_AS(make_env("reacher2d", {{"bogus", 1.0}}), std::invalid_argument);
  CHECK_NOTHROW(make_env("pendulum", {{"g", 9.8}, {"max_torque", 3.0}}));
}

TEST_CASE("reward spot values") {
  const Vec a0 = Vec::Zero(1);

  auto pend = make_env("pendulum");
  Vec next(3);
  next << -1.0, 0.0, 0.0;
  CHECK(pend->reward(next, a0, next) == doctest::Approx(1.0).epsilon(1e-12));

  auto cart = make_env("cartpole");
  Vec cnext = Vec::Zero(4);
  CHECK(cart->reward(cnext, a0, cnext) == doctest::Approx(1.0).epsilon(1e-12));

  auto acro = make_env("acrobot");
  Vec anext(6);
  anext << 1.0, 0.0, 1.0, 0.0, 0.0, 0.0;
  CHECK(acro->reward(anext, a0, anext) == doctest::Approx(-2.0).epsilon(1e-12));

  auto mcar = make_env("mountaincar");
  Vec mnext(2);
  mnext << 0.37, -0.02;
  CHECK(mcar->reward(mnext, a0, mnext) == doctest::Approx(0.37).epsilon(1e-12));

  auto reach = make_env("reacher2d");
  Vec rnext = Vec::Zero(11);
  rnext[8] = 0.3;
  rnext[9] = -0.4;
  Vec ract(2);
  ract << 0.1, 0.2;
  CHECK(reach->reward(rnext, ract, rnext) ==
        doctest::Approx(-0.5 - 0.05).epsilon(1e-12));
}

TEST_CASE("reward matches its closed form term by term at 1000 random states") {
  RngStream rng(17);
  auto check_env = [&](const char* name, auto formula) {
    auto env = make_env(name);
    for (int i = 0; i < 1000; ++i) {
      const Vec next = walked_obs(*env, rng, 3);
      const Vec act = random_action(*env, rng);
      const double got = env->reward(next, act, next);
      const double want = formula(next, act);
      CHECK(std::abs(got - want) <= 1e-12 * (1.0 + std::abs(want)));
    }
  };
  check_env("pendulum", [](const Vec& n, const Vec& a) {
    return -n[0] - 0.1 * n[1] - 0.1 * n[2] * n[2] - 0.001 * a[0] * a[0];
  });
  check_env("cartpole", [](const Vec& n, const Vec&) {
    return std::cos(n[2]) - 0.01 * n[0] * n[0];
  });
  check_env("acrobot", [](const Vec& n, const Vec&) {
    const double th1 = std::atan2(n[1], n[0]);
    const double th2 = std::atan2(n[3], n[2]);
    return -std::cos(th1) - std::cos(th1 + th2);
  });
  check_env("mountaincar", [](const Vec& n, const Vec&) { return n[0]; });
  check_env("reacher2d", [](const Vec& n, const Vec& a) {
    const double dist =
        std::sqrt(n[8] * n[8] + n[9] * n[9] + n[10] * n[10]);
    return -dist - (a[0] * a[0] + a[1] * a[1]);
  });
}

TEST_CASE("reward gradients match central finite differences") {
  RngStream rng(23);
  for (const auto& name : env_names()) {
    CAPTURE(name);
    auto env = make_env(name);
    int done = 0;
    while (done < 100) {
      const Vec next = walked_obs(*env, rng, 5);
      const Vec act = random_action(*env, rng);
      if (name == "reacher2d" && next.segment<3>(8).norm() <= 0.05) continue;
      Vec gn, ga;
      env->reward_gradient(next, act, next, gn, ga);
      Vec fn, fa;
      test::fd_reward_gradient(*env, next, act, next, fn, fa);
      CHECK(test::rel_err(gn, fn) < 1e-5);
      CHECK(test::rel_err(ga, fa) < 1e-5);
      ++done;
    }
  }
}

TEST_CASE("mountaincar gradient is exactly (1, 0) and reacher action term -2a") {
  auto mcar = make_env("mountaincar");
  Vec n(2), gn, ga;
  n << -0.3, 0.01;
  Vec a = Vec::Constant(1, 0.4);
  mcar->reward_gradient(n, a, n, gn, ga);
  CHECK(gn[0] == 1.0);
  CHECK(gn[1] == 0.0);
  CHECK(ga[0] == 0.0);

  auto reach = make_env("reacher2d");
  Vec rn = Vec::Zero(11);
  rn[8] = 0.2;
  Vec ra(2);
  ra << 0.3, -0.7;
  reach->reward_gradient(rn, ra, rn, gn, ga);
  CHECK(ga[0] == doctest::Approx(-0.6).epsilon(1e-12));
  CHECK(ga[1] == doctest::Approx(1.4).epsilon(1e-12));
}

TEST_CASE("mountaincar follows the standard position and velocity update") {
  auto env = make_env("mountaincar");
  Vec s(2), a(1), next;
  s << -0.5, 0.0;
  a << 0.0;
  env->step(s, a, next);
  const double v_want = -0.0025 * std::cos(3.0 * -0.5);
  CHECK(next[1] == doctest::Approx(v_want).epsilon(1e-14));
  CHECK(next[0] == doctest::Approx(-0.5 + v_want).epsilon(1e-14));

  a << 1.0;
  env->step(s, a, next);
  CHECK(next[1] == doctest::Approx(0.0015 + v_want).epsilon(1e-14));
}

TEST_CASE("step is deterministic: equal state and action sequence give equal rollouts") {
  RngStream rng(31);
  for (const auto& name : env_names()) {
    CAPTURE(name);
    auto env = make_env(name);
    const Vec s0 = random_obs(*env, rng);
    std::vector<Vec> actions;
    for (int t = 0; t < 20; ++t) actions.push_back(random_action(*env, rng));
    Vec a_state = s0, b_state = s0, next;
    for (int t = 0; t < 20; ++t) {
      env->step(a_state, actions[t], next);
      a_state = next;
    }
    for (int t = 0; t < 20; ++t) {
      env->step(b_state, actions[t], next);
      b_state = next;
    }
    CHECK(a_state == b_state);
  }
}

TEST_CASE("reset is deterministic in the stream and respects bounds") {
  for (const auto& name : env_names()) {
    CAPTURE(name);
    auto env = make_env(name);
    RngStream a(99), b(99);
    Vec sa, sb;
    env->reset(a, sa);
    env->reset(b, sb);
    CHECK(sa == sb);
    CHECK(sa.allFinite());
  }
}

TEST_CASE("cartpole reset matches its init distribution (Monte Carlo)") {
  auto env = make_env("cartpole");
  RngStream rng(7);
  const int n = 10000;
  Vec sum = Vec::Zero(4);
  Vec s;
  for (int i = 0; i < n; ++i) {
    env->reset(rng, s);
    for (int d = 0; d < 4; ++d) {
      CHECK(std::abs(s[d]) <= 0.05);
    }
    sum += s;
  }
  const Vec mean = sum / n;
  const double se = (0.1 / std::sqrt(12.0)) / std::sqrt(double(n));
  for (int d = 0; d < 4; ++d) {
    CAPTURE(d);
    CHECK(std::abs(mean[d]) < 3.0 * se);
  }
}

TEST_CASE("pendulum zero-width init distribution resets to the distribution mean") {
  auto env = make_env("pendulum", {{"init_th_range", 0.0}, {"init_thdot_range", 0.0}});
  RngStream rng(4);
  Vec s;
  env->reset(rng, s);
  CHECK(s[0] == 1.0);
  CHECK(s[1] == 0.0);
  CHECK(s[2] == 0.0);
}

TEST_CASE("unactuated pendulum conserves mechanical energy to integrator accuracy") {
  auto env = make_env("pendulum");
  const double th0 = 2.0;
  Vec s(3), a = Vec::Zero(1), next;
  s << std::cos(th0), std::sin(th0), 0.0;
  auto energy = [](const Vec& obs) {
    // 0.5 thdot^2 + 15 cos th is conserved by thddot = 15 sin th.
    const double th = std::atan2(obs[1], obs[0]);
    return 0.5 * obs[2] * obs[2] + 15.0 * std::cos(th);
  };
  const double e0 = energy(s);
  double prev = e0;
  for (int t = 0; t < 200; ++t) {
    env->step(s, a, next);
    s = next;
    CHECK(std::abs(s[2]) < 8.0);  // stays clear of the velocity clamp
    const double e = energy(s);
    CHECK(std::abs(e - prev) < 0.5);
    CHECK(std::abs(e - e0) < 1.5);
    prev = e;
  }
}

TEST_CASE("cartpole_et termination predicate") {
  auto env = make_env("cartpole_et");
  Vec s = Vec::Zero(4);
  CHECK_FALSE(env->terminated(s));
  s[2] = 0.41;
  CHECK(env->terminated(s));
  s[2] = -0.41;
  CHECK(env->terminated(s));
  s[2] = 0.39;
  CHECK_FALSE(env->terminated(s));
  s[2] = 0.0;
  s[0] = 2.5;
  CHECK(env->terminated(s));
  s[0] = -2.5;
  CHECK(env->terminated(s));

  auto base = make_env("cartpole");
  s << 3.0, 0.0, 1.0, 0.0;
  CHECK_FALSE(base->terminated(s));
}

TEST_CASE("loosening a termination threshold never terminates earlier") {
  auto tight = make_env("cartpole_et", {{"theta_threshold", 0.2}});
  auto loose = make_env("cartpole_et", {{"theta_threshold", 0.4}});
  RngStream rng(11);
  for (int i = 0; i < 200; ++i) {
    Vec s(4);
    s << rng.uniform(-3.0, 3.0), rng.uniform(-2.0, 2.0), rng.uniform(-0.6, 0.6),
        rng.uniform(-2.0, 2.0);
    if (loose->terminated(s)) CHECK(tight->terminated(s));
  }

  // On a fixed trajectory the first termination index is ordered accordingly.
  auto env = make_env("cartpole_et");
  RngStream reset_rng(3);
  Vec s, next;
  env->reset(reset_rng, s);
  Vec push = Vec::Constant(1, 1.0);
  int first_tight = -1, first_loose = -1;
  Vec st = s;
  for (int t = 0; t < 200; ++t) {
    env->step(st, push, next);
    st = next;
    if (first_tight < 0 && tight->terminated(st)) first_tight = t;
    if (first_loose < 0 && loose->terminated(st)) first_loose = t;
  }
  REQUIRE(first_tight >= 0);
  REQUIRE(first_loose >= 0);
  CHECK(first_loose >= first_tight);
}

TEST_CASE("actions are clamped to bounds inside step") {
  RngStream rng(41);
  for (const auto& name : env_names()) {
    CAPTURE(name);
    auto env = make_env(name);
    const auto& spec = env->spec();
    const Vec s = random_obs(*env, rng);
    Vec big = Vec::Constant(spec.act_dim, 10.0);
    Vec small = Vec::Constant(spec.act_dim, -10.0);
    Vec n1, n2;
    env->step(s, big, n1);
    env->step(s, spec.act_high, n2);
    CHECK(n1 == n2);
    env->step(s, small, n1);
    env->step(s, spec.act_low, n2);
    CHECK(n1 == n2);
  }
}

TEST_CASE("discrete cartpole maps actions to their sign") {
  auto env = make_env("cartpole", {{"discrete", 1.0}});
  RngStream rng(5);
  Vec s;
  env->reset(rng, s);
  Vec n1, n2;
  env->step(s, Vec::Constant(1, 0.7), n1);
  env->step(s, Vec::Constant(1, 1.0), n2);
  CHECK(n1 == n2);
  env->step(s, Vec::Constant(1, 0.7), n1);
  env->step(s, Vec::Constant(1, 0.2), n2);
  CHECK(n1 == n2);
  env->step(s, Vec::Constant(1, -0.3), n1);
  env->step(s, Vec::Constant(1, -1.0), n2);
  CHECK(n1 == n2);
  env->step(s, Vec::Constant(1, 0.3), n1);
  env->step(s, Vec::Constant(1, -0.3), n2);
  CHECK(n1 != n2);
}

TEST_CASE("non-finite or mis-sized inputs to step are rejected") {
  auto env = make_env("pendulum");
  Vec s(3), a(1), next;
  s << 1.0, 0.0, 0.0;
  a << std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(env->step(s, a, next), std::invalid_argument);
  a << std::numeric_limits<double>::infinity();
  CHECK_THROWS_AS(env->step(s, a, next), std::invalid_argument);
  a << 0.0;
  s[1] = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(env->step(s, a, next), std::invalid_argument);

  Vec bad_obs(2), bad_act(2);
  bad_obs << 1.0, 0.0;
  bad_act << 0.0, 0.0;
  s << 1.0, 0.0, 0.0;
  CHECK_THROWS_AS(env->step(bad_obs, a, next), std::invalid_argument);
  CHECK_THROWS_AS(env->step(s, bad_act, next), std::invalid_argument);
}
