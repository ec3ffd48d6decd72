#include <doctest.h>

#include <cmath>
#include <set>

#include "hrtdp/errors.hpp"
#include "hrtdp/lookahead.hpp"
#include "oracles.hpp"

using namespace hrtdp;

namespace {

std::vector<State> layer(std::initializer_list<State> xs) { return xs; }

}  // namespace

TEST_CASE("forward_pass examples") {
  const Mdp absorbing(1, 2, 3, {0.0, 0.0}, {{{0, 1.0}}, {{0, 1.0}}});
  const ReachSets a = forward_pass(absorbing, 0, 3);
  REQUIRE(a.layers.size() == 4);
  for (const auto& l : a.layers) CHECK(l == layer({0}));
  CHECK(a.total_up_to_h == 3);

  const ReachSets b = forward_pass(chain3(), 0, 2);
  CHECK(b.layer(1) == layer({0}));
  CHECK(b.layer(2) == layer({0, 1}));
  CHECK(b.layer(3) == layer({0, 1, 2}));
  CHECK(b.total_up_to_h == 3);

  const ReachSets c = forward_pass(chain3(), 2, 2);
  for (std::size_t t = 1; t <= 3; ++t) CHECK(c.layer(t) == layer({2}));
  CHECK(c.total_up_to_h == 2);

  CHECK_THROWS_AS(forward_pass(chain3(), 0, 0), ContractError);
  CHECK_THROWS_AS(forward_pass(chain3(), 3, 1), std::out_of_range);
}

TEST_CASE("forward_pass matches breadth-first reach oracle") {
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    const Mdp m = oracle::random_mdp(seed, 12, 3, 4, 2);
    for (std::size_t h = 1; h <= 4; ++h) {
      const State s = seed % 12;
      const ReachSets rs = forward_pass(m, s, h);
      const auto ref = oracle::reach_layers(m, s, h);
      std::size_t total = 0;
      for (std::size_t t = 1; t <= h + 1; ++t) {
        CHECK(rs.layer(t) == std::vector<State>(ref[t - 1].begin(), ref[t - 1].end()));
        if (t <= h) total += ref[t - 1].size();
      }
      CHECK(rs.total_up_to_h == total);
    }
  }
}

TEST_CASE("backward_pass examples on chain3") {
  const Mdp m = chain3();
  const auto r1 = backward_pass(forward_pass(m, 1, 2), m, Terminal::zero(), 2);
  CHECK(r1.action == kFwd);
  CHECK(r1.root_value == 1.0);
  CHECK(r1.backups_performed == 3);

  const auto r0 = backward_pass(forward_pass(m, 0, 2), m, Terminal::zero(), 2);
  CHECK(r0.action == kStay);
  CHECK(r0.root_value == 0.0);

  const FullValueFunction vstar = optimal_values(m);
  for (State s = 0; s < 3; ++s) {
    const auto r = backward_pass(forward_pass(m, s, 1), m, Terminal::dense(vstar.row(2)), 1);
    CHECK(r.root_value == vstar(1, s));
  }
}

TEST_CASE("lookahead_action equals the composition and the spec examples") {
  const Mdp m = chain3();
  for (State s = 0; s < 3; ++s) {
    for (std::size_t h = 1; h <= 2; ++h) {
      CHECK(lookahead_action(m, s, h, Terminal::zero()) ==
            backward_pass(forward_pass(m, s, h), m, Terminal::zero(), h));
    }
  }
  CHECK(lookahead_action(m, 1, 2, Terminal::zero()) == LookaheadResult{kFwd, 1.0, 3});
  CHECK(lookahead_action(m, 2, 2, Terminal::zero()) == LookaheadResult{kStay, 2.0, 2});
}

TEST_CASE("missing terminal values are a contract error") {
  const Mdp m = chain3();
  const Terminal partial = Terminal::sparse({{0, 0.0}, {1, 0.0}});
  CHECK_THROWS_AS(lookahead_action(m, 0, 2, partial), ContractError);
  CHECK_NOTHROW(lookahead_action(m, 0, 1, partial));
  CHECK_THROWS_AS(backward_pass(forward_pass(m, 0, 2), m, Terminal::zero(), 1), ContractError);
}

TEST_CASE("h_bellman examples") {
  const Mdp m = chain3();
  CHECK(h_bellman(m, 1, 0, Terminal::constant(3.5)) == 3.5);
  CHECK(h_bellman(m, 1, 2, Terminal::zero()) == 1.0);
  const FullValueFunction vstar = optimal_values(m);
  for (State s = 0; s < 3; ++s) CHECK(h_bellman(m, s, m.horizon(), Terminal::zero()) == vstar(1, s));
}

TEST_CASE("h_bellman matches the expectimax oracle") {
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    const Mdp m = oracle::random_mdp(seed, 7, 3, 4, 3);
    std::vector<double> terminal(7);
    for (State s = 0; s < 7; ++s) terminal[s] = counter_uniform(seed, s, 9) * 3.0;
    for (std::size_t h = 1; h <= 3; ++h) {
      for (State s = 0; s < 7; ++s) {
        const double ref = oracle::expectimax(m, s, h, [&](State x) { return terminal[x]; });
        CHECK(std::abs(h_bellman(m, s, h, Terminal::dense(terminal)) - ref) <= 1e-12);
      }
    }
  }
}

TEST_CASE("T^h composes, is monotone and shifts with constants") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const Mdp m = oracle::random_mdp(seed, 6, 2, 4, 3);
    std::vector<double> v(6), w(6);
    for (State s = 0; s < 6; ++s) {
      v[s] = counter_uniform(seed, s, 1);
      w[s] = v[s] + counter_uniform(seed, s, 2);
    }
    // T^2 v = T(T v)
    std::vector<double> tv(6);
    for (State s = 0; s < 6; ++s) tv[s] = h_bellman(m, s, 1, Terminal::dense(v));
    for (State s = 0; s < 6; ++s) {
      CHECK(std::abs(h_bellman(m, s, 2, Terminal::dense(v)) - h_bellman(m, s, 1, Terminal::dense(tv))) <= 1e-12);
      CHECK(h_bellman(m, s, 3, Terminal::dense(v)) <= h_bellman(m, s, 3, Terminal::dense(w)) + 1e-12);
      std::vector<double> shifted(v);
      for (double& x : shifted) x += 0.75;
      CHECK(std::abs(h_bellman(m, s, 2, Terminal::dense(shifted)) - h_bellman(m, s, 2, Terminal::dense(v)) - 0.75) <=
            1e-12);
    }
  }
}

TEST_CASE("exhaustive_lookahead examples and refusal") {
  const Mdp m = chain3();
  const auto a = exhaustive_lookahead(m, 1, 2, Terminal::zero());
  CHECK(a.action == kFwd);
  CHECK(a.root_value == 1.0);
  const auto b = exhaustive_lookahead(m, 0, 2, Terminal::zero());
  CHECK(b.action == kStay);
  CHECK(b.root_value == 0.0);

  const Mdp big = oracle::random_mdp(1, 30, 2, 5, 4);
  CHECK_THROWS_AS(exhaustive_lookahead(big, 0, 5, Terminal::zero()), RefusalError);
  const Mdp wide = oracle::random_mdp(1, 3, 5, 2, 1);
  CHECK_THROWS_AS(exhaustive_lookahead(wide, 0, 1, Terminal::zero()), RefusalError);
}

TEST_CASE("exhaustive_lookahead agrees with lookahead_action inside the guard") {
  int compared = 0;
  for (std::uint64_t seed = 0; seed < 60; ++seed) {
    const Mdp m = oracle::random_mdp(seed, 5, 3, 3, 2);
    std::vector<double> terminal(5);
    for (State s = 0; s < 5; ++s) terminal[s] = std::floor(counter_uniform(seed, s, 4) * 4.0) / 2.0;
    for (std::size_t h = 1; h <= 3; ++h) {
      for (State s = 0; s < 5; ++s) {
        if (forward_pass(m, s, h).total_up_to_h > ExhaustiveGuard{}.max_reachable) continue;
        const auto fb = lookahead_action(m, s, h, Terminal::dense(terminal));
        const auto ex = exhaustive_lookahead(m, s, h, Terminal::dense(terminal));
        CHECK(std::abs(fb.root_value - ex.root_value) <= 1e-9);
        const auto best = oracle::best_actions(m, s, h, [&](State x) { return terminal[x]; });
        CHECK(std::find(best.begin(), best.end(), fb.action) != best.end());
        ++compared;
      }
    }
  }
  CHECK(compared > 100);
}

TEST_CASE("abstract_lookahead") {
  const Mdp m = chain3();
  const std::vector<std::size_t> identity{0, 1, 2};
  const std::vector<double> v{0.5, 0.25, 1.0};
  for (State s = 0; s < 3; ++s) {
    CHECK(abstract_lookahead(m, s, 2, v, identity) == lookahead_action(m, s, 2, Terminal::dense(v)));
  }

  const std::vector<std::size_t> phi{0, 0, 1};
  const std::vector<double> abs_values{0.0, 1.0};
  const auto r = abstract_lookahead(m, 1, 2, abs_values, phi);
  CHECK(r.action == kFwd);
  const std::vector<double> composed{0.0, 0.0, 1.0};
  CHECK(r.root_value == h_bellman(m, 1, 2, Terminal::dense(composed)));
  CHECK(r.root_value == 2.0);

  const std::vector<double> zeros{0.0, 0.0};
  for (State s = 0; s < 3; ++s) {
    CHECK(abstract_lookahead(m, s, 2, zeros, phi).root_value == h_bellman(m, s, 2, Terminal::zero()));
  }
}
