#include <doctest.h>

#include <cmath>
#include <map>
#include <stdexcept>

#include "hrtdp/errors.hpp"
#include "hrtdp/mdp.hpp"
#include "oracles.hpp"

using namespace hrtdp;

namespace {

Mdp chain3_with(std::vector<double> rewards, std::vector<std::vector<Transition>> rows) {
  return Mdp(3, 2, 2, std::move(rewards), std::move(rows));
}

}  // namespace

TEST_CASE("validate_mdp accepts chain3") { CHECK(validate_mdp(chain3()).empty()); }

TEST_CASE("validate_mdp flags an out-of-range reward") {
  const Mdp base = chain3();
  std::vector<double> r = base.rewards();
  r[2 * 2 + 0] = 1.5;
  const auto report = validate_mdp(chain3_with(r, base.rows()));
  REQUIRE(report.size() == 1);
  CHECK(report[0].message == "reward out of [0,1]");
  CHECK(report[0].state == 2);
  CHECK(report[0].action == 0);
}

TEST_CASE("validate_mdp flags a row that does not sum to one") {
  const Mdp base = chain3();
  auto rows = base.rows();
  rows[0 * 2 + kFwd] = {{1, 0.5}, {2, 0.4}};
  const auto report = validate_mdp(chain3_with(base.rewards(), rows));
  REQUIRE(report.size() == 1);
  CHECK(report[0].message == "row sum != 1");
  CHECK_THROWS_AS(require_valid(chain3_with(base.rewards(), rows)), ValidationError);
}

TEST_CASE("validate_mdp flags negative probabilities and bad successors") {
  const Mdp base = chain3();
  auto rows = base.rows();
  rows[1] = {{0, 1.5}, {1, -0.5}};
  rows[2] = {{7, 1.0}};
  const auto report = validate_mdp(chain3_with(base.rewards(), rows));
  std::map<std::string, int> seen;
  for (const auto& v : report) ++seen[v.message];
  CHECK(seen["negative probability"] == 1);
  CHECK(seen["successor out of range"] == 1);
}

TEST_CASE("constructor rejects shape mismatches") {
  CHECK_THROWS_AS(Mdp(3, 2, 2, std::vector<double>(5, 0.0), chain3().rows()), ConfigError);
  CHECK_THROWS_AS(Mdp(3, 2, 2, std::vector<double>(6, 0.0), {}), ConfigError);
}

TEST_CASE("successors echoes rows in successor order") {
  const Mdp m = chain3();
  const auto a = successors(m, 0, kFwd);
  REQUIRE(a.size() == 1);
  CHECK(a[0] == Transition{1, 1.0});
  const auto b = successors(m, 2, kFwd);
  REQUIRE(b.size() == 1);
  CHECK(b[0] == Transition{2, 1.0});

  auto rows = m.rows();
  rows[0] = {{2, 0.05}, {0, 0.95}};
  const Mdp two = m.with_rows(rows);
  const auto c = successors(two, 0, kStay);
  REQUIRE(c.size() == 2);
  CHECK(c[0] == Transition{0, 0.95});
  CHECK(c[1] == Transition{2, 0.05});
  CHECK_THROWS_AS(successors(m, 3, 0), std::out_of_range);
  CHECK_THROWS_AS(successors(m, 0, 2), std::out_of_range);
}

TEST_CASE("optimal_values on chain3") {
  const FullValueFunction v = optimal_values(chain3());
  for (State s = 0; s < 3; ++s) {
    CHECK(v(1, s) == std::vector<double>{0, 1, 2}[s]);
    CHECK(v(2, s) == std::vector<double>{0, 0, 1}[s]);
    CHECK(v(3, s) == 0.0);
  }
}

TEST_CASE("optimal_values degenerate instances") {
  const Mdp zero(2, 2, 3, std::vector<double>(4, 0.0), {{{1, 1.0}}, {{0, 1.0}}, {{0, 0.5}, {1, 0.5}}, {{1, 1.0}}});
  const FullValueFunction vz = optimal_values(zero);
  for (std::size_t t = 1; t <= 4; ++t) {
    for (State s = 0; s < 2; ++s) CHECK(vz(t, s) == 0.0);
  }
  const Mdp unit(1, 1, 4, {1.0}, {{{0, 1.0}}});
  const FullValueFunction vu = optimal_values(unit);
  for (std::size_t t = 1; t <= 5; ++t) CHECK(vu(t, 0) == doctest::Approx(4.0 - static_cast<double>(t) + 1.0));
}

TEST_CASE("optimal_values matches brute-force policy enumeration") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const Mdp m = oracle::random_mdp(seed, 3, 2, 3, 2);
    const FullValueFunction v = optimal_values(m);
    const std::vector<double> ref = oracle::brute_force_optimal(m);
    for (State s = 0; s < 3; ++s) CHECK(std::abs(v(1, s) - ref[s]) <= 1e-12);
  }
}

TEST_CASE("evaluate_policy") {
  const Mdp m = chain3();
  const NonstationaryPolicy stay(2, 3, kStay);
  const FullValueFunction vs = evaluate_policy(m, stay);
  CHECK(vs(1, 0) == 0.0);
  CHECK(vs(1, 1) == 0.0);
  CHECK(vs(1, 2) == 2.0);

  NonstationaryPolicy greedy(2, 3, kFwd);
  const FullValueFunction vg = evaluate_policy(m, greedy);
  const FullValueFunction vstar = optimal_values(m);
  for (State s = 0; s < 3; ++s) CHECK(vg(1, s) == vstar(1, s));

  const Mdp zero = Mdp(3, 2, 2, std::vector<double>(6, 0.0), m.rows());
  CHECK(evaluate_policy(zero, greedy)(1, 1) == 0.0);

  CHECK_THROWS_AS(evaluate_policy(m, NonstationaryPolicy(3, 3)), ContractError);
  CHECK_THROWS_AS(evaluate_policy(m, NonstationaryPolicy(2, 3, 5)), ContractError);
}

TEST_CASE("evaluate_policy of the greedy policy equals V* on random instances") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const Mdp m = oracle::random_mdp(seed, 6, 3, 4, 3);
    const FullValueFunction vstar = optimal_values(m);
    NonstationaryPolicy pi(4, 6);
    for (std::size_t t = 1; t <= 4; ++t) {
      for (State s = 0; s < 6; ++s) pi.set(s, t, greedy_backup(m, s, [&](State x) { return vstar(t + 1, x); }).action);
    }
    const FullValueFunction v = evaluate_policy(m, pi);
    for (std::size_t t = 1; t <= 5; ++t) {
      for (State s = 0; s < 6; ++s) CHECK(v(t, s) == vstar(t, s));
    }
  }
}

TEST_CASE("sample_successor uses the inverse CDF") {
  const std::vector<Transition> point{{1, 1.0}};
  const std::vector<Transition> half{{0, 0.5}, {1, 0.5}};
  CHECK(sample_successor(point, 0.0) == 1);
  CHECK(sample_successor(point, 0.999) == 1);
  CHECK(sample_successor(half, 0.25) == 0);
  CHECK(sample_successor(half, 0.75) == 1);

  Rng rng(3);
  for (int i = 0; i < 100; ++i) CHECK(sample_transition(chain3(), 0, kFwd, rng) == 1);
}

TEST_CASE("sampling frequencies stay within three standard errors") {
  const Mdp base = chain3();
  auto rows = base.rows();
  rows[0] = {{0, 0.2}, {1, 0.5}, {2, 0.3}};
  const Mdp m = base.with_rows(rows);
  Rng rng(12345);
  constexpr int kDraws = 100000;
  std::vector<int> counts(3, 0);
  for (int i = 0; i < kDraws; ++i) ++counts[sample_transition(m, 0, kStay, rng)];
  const std::vector<double> p{0.2, 0.5, 0.3};
  for (State s = 0; s < 3; ++s) {
    const double freq = counts[s] / static_cast<double>(kDraws);
    const double se = std::sqrt(p[s] * (1.0 - p[s]) / kDraws);
    CHECK(std::abs(freq - p[s]) <= 3.0 * se);
  }
}

TEST_CASE("Rng is reproducible and below stays in range") {
  Rng a(99);
  Rng b(99);
  for (int i = 0; i < 1000; ++i) {
    const double u = a.uniform();
    CHECK(u == b.uniform());
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
  }
  Rng c(5);
  for (int i = 0; i < 1000; ++i) CHECK(c.below(7) < 7);
  CHECK(counter_uniform(1, 2, 3) == counter_uniform(1, 2, 3));
  CHECK(counter_uniform(1, 2, 3) != counter_uniform(1, 3, 2));
}

TEST_CASE("initial state schedules") {
  const InitSchedule fixed = InitSchedule::fixed(2);
  CHECK(fixed.start_state(1, 5) == 2);
  CHECK(fixed.start_state(9, 5) == 2);

  const InitSchedule rr = InitSchedule::round_robin();
  CHECK(rr.start_state(1, 3) == 0);
  CHECK(rr.start_state(2, 3) == 1);
  CHECK(rr.start_state(4, 3) == 0);
  CHECK(InitSchedule::round_robin(2).start_state(3, 10) == 0);

  const InitSchedule rnd = InitSchedule::random(7, 4);
  for (std::size_t k = 1; k <= 50; ++k) {
    CHECK(rnd.start_state(k, 10) < 4);
    CHECK(rnd.start_state(k, 10) == rnd.start_state(k, 10));
  }
}

TEST_CASE("rows are normalized to sorted sparse form") {
  const Mdp m(2, 1, 1, {0.0, 0.0}, {{{1, 0.25}, {0, 0.0}, {1, 0.25}, {0, 0.5}}, {{1, 1.0}}});
  const auto row = m.row(0, 0);
  REQUIRE(row.size() == 2);
  CHECK(row[0] == Transition{0, 0.5});
  CHECK(row[1] == Transition{1, 0.5});
  CHECK(m.max_branching() == 2);
}
