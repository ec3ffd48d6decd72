#include <doctest.h>

#include <cmath>

#include "hrtdp/envgen.hpp"
#include "hrtdp/errors.hpp"
#include "oracles.hpp"

using namespace hrtdp;

namespace {

GenSpec random_spec(std::uint64_t seed, std::size_t S, std::size_t b) {
  GenSpec spec;
  spec.family = Family::kRandom;
  spec.num_states = S;
  spec.num_actions = 3;
  spec.horizon = 4;
  spec.branching = b;
  spec.seed = seed;
  return spec;
}

}  // namespace

TEST_CASE("chain spec reproduces the chain3 fixture") {
  GenSpec spec;
  spec.family = Family::kChain;
  spec.num_states = 3;
  spec.horizon = 2;
  CHECK(gen(spec) == chain3());
}

TEST_CASE("random generation is deterministic and respects the branching bound") {
  CHECK(gen(random_spec(5, 30, 3)) == gen(random_spec(5, 30, 3)));
  CHECK_FALSE(gen(random_spec(5, 30, 3)) == gen(random_spec(6, 30, 3)));
  const Mdp m = gen(random_spec(1, 50, 2));
  CHECK(m.max_branching() <= 2);
  CHECK(validate_mdp(m).empty());
}

TEST_CASE("gridworld shape") {
  GenSpec spec;
  spec.family = Family::kGridworld;
  spec.width = 4;
  spec.height = 3;
  spec.horizon = 6;
  spec.reward_density = 0.2;
  spec.slip = 0.1;
  const Mdp m = gen(spec);
  CHECK(m.num_states() == 12);
  CHECK(m.num_actions() == 4);
  CHECK(m.reward(11, 0) == 1.0);
  CHECK(m.max_branching() <= 2);
}

TEST_CASE("infeasible specs are configuration errors") {
  GenSpec spec = random_spec(0, 3, 4);
  CHECK_THROWS_AS(gen(spec), ConfigError);
  spec.branching = 2;
  spec.horizon = 0;
  CHECK_THROWS_AS(gen(spec), ConfigError);
  spec.horizon = 2;
  spec.reward_density = 1.5;
  CHECK_THROWS_AS(gen(spec), ConfigError);
  GenSpec grid;
  grid.family = Family::kGridworld;
  CHECK_THROWS_AS(gen(grid), ConfigError);
}

TEST_CASE("perturb_model") {
  const Mdp m = gen(random_spec(3, 20, 3));
  CHECK(perturb_model(m, 0.0, 7) == m);

  const std::vector<Transition> p{{0, 1.0}};
  const std::vector<Transition> q{{0, 0.5}, {1, 0.5}};
  const auto mixed = mix_rows(p, q, 0.1);
  REQUIRE(mixed.size() == 2);
  CHECK(mixed[0].prob == doctest::Approx(0.95));
  CHECK(mixed[1].prob == doctest::Approx(0.05));
  CHECK(l1_distance(p, mixed) == doctest::Approx(0.1));

  for (double eps : {0.02, 0.05, 0.2, 1.0}) {
    const Mdp hat = perturb_model(m, eps, 11);
    CHECK(validate_mdp(hat).empty());
    CHECK(hat.rewards() == m.rewards());
    for (State s = 0; s < m.num_states(); ++s) {
      for (Action a = 0; a < m.num_actions(); ++a) CHECK(l1_distance(m.row(s, a), hat.row(s, a)) <= eps + 1e-12);
    }
    CHECK(perturb_model(m, eps, 11) == hat);
  }
  CHECK_THROWS_AS(perturb_model(m, 2.5, 0), ConfigError);
}

TEST_CASE("make_value_noise") {
  CHECK(make_value_noise(0.0, 3)(4, 5) == 0.0);
  const ValueNoise n = make_value_noise(0.05, 8);
  for (int i = 0; i < 10000; ++i) {
    const double x = n(static_cast<State>(i % 97), static_cast<std::size_t>(i));
    CHECK(std::abs(x) <= 0.05);
  }
  CHECK(n(3, 4) == make_value_noise(0.05, 8)(3, 4));
  CHECK_THROWS_AS(make_value_noise(-1.0, 0), ConfigError);
}

TEST_CASE("build_abstraction on chain3") {
  const Mdp m = chain3();
  const AbstractionMap coarse = build_abstraction(m, 2, 1.5);
  CHECK(coarse.num_abstract() == 2);
  CHECK(coarse(0, 0) == coarse(0, 1));
  CHECK(coarse(0, 1) != coarse(0, 2));

  const AbstractionMap fine = build_abstraction(m, 2, 0.0);
  CHECK(fine.num_abstract() == 3);
  CHECK(fine(0, 0) != fine(0, 1));
  CHECK(fine(0, 1) != fine(0, 2));
}

TEST_CASE("built abstractions keep the spread within eps") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const Mdp m = gen(random_spec(seed, 40, 3));
    for (double eps : {0.0, 0.1, 0.5}) {
      const AbstractionMap map = build_abstraction(m, 2, eps);
      CHECK(abstraction_spread(m, 2, map) <= eps);
      CHECK(map.num_checkpoints() == 3);
    }
  }
}

TEST_CASE("replicate builds a disjoint union") {
  const Mdp m = gen(random_spec(2, 5, 2));
  const Mdp twice = replicate(m, 2);
  CHECK(twice.num_states() == 10);
  for (State s = 0; s < 5; ++s) {
    for (Action a = 0; a < 3; ++a) {
      CHECK(twice.reward(s + 5, a) == m.reward(s, a));
      const auto r0 = twice.row(s, a);
      const auto r1 = twice.row(s + 5, a);
      REQUIRE(r0.size() == r1.size());
      for (std::size_t i = 0; i < r0.size(); ++i) {
        CHECK(r1[i].next == r0[i].next + 5);
        CHECK(r1[i].prob == r0[i].prob);
      }
    }
  }
  for (std::size_t k = 1; k <= 20; ++k) CHECK(twice.init().start_state(k, 10) < 5);
  const FullValueFunction v1 = optimal_values(m);
  const FullValueFunction v2 = optimal_values(twice);
  for (State s = 0; s < 5; ++s) CHECK(v2(1, s + 5) == v1(1, s));
}
