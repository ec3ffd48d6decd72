#include <doctest.h>

#include "hrtdp/envgen.hpp"
#include "hrtdp/errors.hpp"
#include "hrtdp/planner.hpp"
#include "oracles.hpp"

using namespace hrtdp;

namespace {

RunOptions options(std::size_t K, std::uint64_t seed, bool monitor = true) {
  RunOptions o;
  o.episodes = K;
  o.seed = seed;
  o.monitor = monitor;
  return o;
}

// A table that has moved away from its initial values.
ValueTable trained_table(const Mdp& m, const VariantSpec& v, std::size_t h, std::size_t K, std::uint64_t seed) {
  RunOptions o = options(K, seed, false);
  o.snapshot_episodes = {K};
  return run_h_rtdp(m, v, h, o).snapshots.front().second;
}

}  // namespace

TEST_CASE("act examples on chain3") {
  const Mdp m = chain3();
  const VariantSpec exact = VariantSpec::exact();
  CHECK(act(m, init_table(3, 2, 1), 1, 1, exact) == kStay);
  CHECK(act(m, init_table(3, 2, 2), 1, 1, exact) == kFwd);
  CHECK_THROWS_AS(act(m, init_table(3, 2, 1), 1, 0, exact), ContractError);
  CHECK_THROWS_AS(act(m, init_table(3, 2, 1), 1, 3, exact), ContractError);
}

TEST_CASE("act under AM with an exact model matches exact") {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const Mdp m = oracle::random_mdp(seed, 8, 3, 4, 3);
    const VariantSpec am = VariantSpec::approx_model_of(m, 0.0);
    const ValueTable table = trained_table(m, VariantSpec::exact(), 2, 5, seed);
    for (std::size_t t = 1; t <= 4; ++t) {
      for (State s = 0; s < 8; ++s) {
        CHECK(act(am.planning_model(m), table, s, t, am) == act(m, table, s, t, VariantSpec::exact()));
      }
    }
  }
}

TEST_CASE("checkpoint_update examples") {
  const Mdp m = chain3();
  ValueTable table = init_table(3, 2, 2);
  CHECK(checkpoint_update(m, table, 1, 1, VariantSpec::exact(), 1) == 1.0);
  CHECK(table.get(0, 1) == 1.0);
  CHECK_THROWS_AS(checkpoint_update(m, table, 1, 2, VariantSpec::exact(), 1), ContractError);
  CHECK_THROWS_AS(checkpoint_update(m, table, 1, 3, VariantSpec::exact(), 1), ContractError);
}

TEST_CASE("AV with zero noise and AA with identity abstraction update like exact") {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const Mdp m = oracle::random_mdp(seed, 6, 2, 4, 2);
    const VariantSpec av = VariantSpec::approx_value(ValueNoise(0.0, seed));
    const VariantSpec aa = VariantSpec::approx_abstraction(AbstractionMap::identity(6, 3), 0.0);
    ValueTable a = trained_table(m, VariantSpec::exact(), 2, 3, seed);
    ValueTable b = a;
    ValueTable c = a;
    for (State s = 0; s < 6; ++s) {
      for (std::size_t t : {1, 3}) {
        const double x = checkpoint_update(m, a, s, t, VariantSpec::exact(), 1);
        CHECK(checkpoint_update(m, b, s, t, av, 1) == x);
        CHECK(checkpoint_update(m, c, s, t, aa, 1) == x);
      }
    }
    CHECK(a == b);
    CHECK(a == c);
  }
}

TEST_CASE("AV updates never raise an entry") {
  const Mdp m = oracle::random_mdp(3, 6, 2, 4, 2);
  const VariantSpec av = VariantSpec::approx_value(ValueNoise(0.3, 5));
  ValueTable table = init_table(6, 4, 2);
  for (std::size_t k = 1; k <= 20; ++k) {
    for (State s = 0; s < 6; ++s) {
      const double old = table.get(1, s);
      checkpoint_update(m, table, s, 3, av, k);
      CHECK(table.get(1, s) <= old);
    }
  }
}

TEST_CASE("run_h_rtdp hand traces on chain3") {
  const Mdp m = chain3().with_init(InitSchedule::fixed(1));
  const RunLog h1 = run_h_rtdp(m, VariantSpec::exact(), 1, options(3, 0));
  CHECK(h1.regrets() == std::vector<double>{1.0, 0.0, 0.0});
  CHECK(h1.violations.empty());
  CHECK(h1.episodes[0].actions == std::vector<Action>{kStay, kStay});

  const RunLog h2 = run_h_rtdp(m, VariantSpec::exact(), 2, options(3, 0));
  CHECK(h2.regrets() == std::vector<double>{0.0, 0.0, 0.0});
  CHECK(h2.episodes[0].root_value == 1.0);
  CHECK(h2.violations.empty());
}

TEST_CASE("AM with an exact model reproduces the exact run") {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const Mdp m = oracle::random_mdp(seed, 10, 3, 4, 3);
    const RunLog a = run_h_rtdp(m, VariantSpec::exact(), 2, options(20, seed));
    const RunLog b = run_h_rtdp(m, VariantSpec::approx_model_of(m, 0.0), 2, options(20, seed));
    CHECK(a.episodes == b.episodes);
    CHECK(b.violations.empty());
  }
}

TEST_CASE("identity abstraction reproduces the exact run") {
  const Mdp m = oracle::random_mdp(11, 10, 3, 4, 3);
  const RunLog a = run_h_rtdp(m, VariantSpec::exact(), 2, options(20, 4));
  const RunLog b =
      run_h_rtdp(m, VariantSpec::approx_abstraction(AbstractionMap::identity(10, 3), 0.0), 2, options(20, 4));
  CHECK(a.episodes == b.episodes);
}

TEST_CASE("materialized policy equals act over every (s, t)") {
  for (std::uint64_t seed = 0; seed < 8; ++seed) {
    const Mdp m = oracle::random_mdp(seed, 9, 3, 6, 3);
    for (std::size_t h : {1, 2, 3, 6}) {
      std::vector<VariantSpec> variants{VariantSpec::exact(),
                                        VariantSpec::approx_abstraction(build_abstraction(m, h, 0.3), 0.3)};
      for (const VariantSpec& v : variants) {
        const ValueTable table = trained_table(m, v, h, 4, seed);
        const NonstationaryPolicy pi = materialize_policy(m, table, v);
        for (std::size_t t = 1; t <= 6; ++t) {
          for (State s = 0; s < 9; ++s) CHECK(pi(s, t) == act(m, table, s, t, v));
        }
      }
    }
  }
}

TEST_CASE("runs are deterministic per seed") {
  const Mdp m = oracle::random_mdp(2, 15, 3, 4, 3);
  const RunLog a = run_h_rtdp(m, VariantSpec::exact(), 2, options(30, 9));
  const RunLog b = run_h_rtdp(m, VariantSpec::exact(), 2, options(30, 9));
  CHECK(a == b);
  const RunLog c = run_h_rtdp(m, VariantSpec::exact(), 2, options(30, 10));
  CHECK_FALSE(a.episodes == c.episodes);
}

TEST_CASE("monitors stay quiet on exact runs") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const Mdp stochastic = oracle::random_mdp(seed, 12, 3, 4, 3);
    const Mdp deterministic = oracle::deterministic_mdp(seed, 12, 3, 4);
    for (std::size_t h : {1, 2, 4}) {
      CHECK(run_h_rtdp(stochastic, VariantSpec::exact(), h, options(40, seed)).violations.empty());
      CHECK(run_h_rtdp(deterministic, VariantSpec::exact(), h, options(40, seed)).violations.empty());
    }
  }
}

TEST_CASE("monitors detect a pessimistic start") {
  const Mdp m = chain3();
  RunOptions o = options(2, 0);
  ValueTable bad = init_table(3, 2, 1);
  bad.set(1, 2, 0.0);
  o.initial_table = bad;
  const RunLog log = run_h_rtdp(m, VariantSpec::exact(), 1, o);
  CHECK_FALSE(log.violations.empty());
}

TEST_CASE("plain RTDP equals exact h-RTDP with h = 1") {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const Mdp m = oracle::random_mdp(seed, 10, 3, 5, 3);
    RunOptions o = options(25, seed);
    o.snapshot_episodes = {1, 10, 25};
    CHECK(run_rtdp(m, o) == run_h_rtdp(m, VariantSpec::exact(), 1, o));
  }
}

TEST_CASE("abstraction tables hold S_phi entries per checkpoint") {
  const Mdp m = oracle::random_mdp(6, 20, 2, 4, 3);
  const AbstractionMap phi = build_abstraction(m, 2, 0.5);
  const RunLog log = run_h_rtdp(m, VariantSpec::approx_abstraction(phi, 0.5), 2, options(10, 1));
  CHECK(log.table_entries == phi.num_abstract() * 3);
  CHECK(log.violations.empty());
}

TEST_CASE("initial table shape is checked") {
  RunOptions o = options(1, 0);
  o.initial_table = init_table(3, 2, 2);
  CHECK_THROWS_AS(run_h_rtdp(chain3(), VariantSpec::exact(), 1, o), ConfigError);
}
