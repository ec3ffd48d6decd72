#include "hrtdp/envgen.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

#include "hrtdp/errors.hpp"

namespace hrtdp {

namespace {

Mdp gen_chain(const GenSpec& spec) {
  const std::size_t S = spec.num_states;
  std::vector<double> rewards(S * 2, 0.0);
  std::vector<std::vector<Transition>> rows;
  rows.reserve(S * 2);
  for (State s = 0; s < S; ++s) {
    rewards[s * 2] = rewards[s * 2 + 1] = (s + 1 == S) ? 1.0 : 0.0;
    rows.push_back({{s, 1.0}});
    const State up = std::min(s + 1, S - 1);
    if (spec.slip > 0.0 && up != s) {
      rows.push_back({{s, spec.slip}, {up, 1.0 - spec.slip}});
    } else {
      rows.push_back({{up, 1.0}});
    }
  }
  return Mdp(S, 2, spec.horizon, std::move(rewards), std::move(rows), spec.init);
}

Mdp gen_gridworld(const GenSpec& spec) {
  const std::size_t W = spec.width;
  const std::size_t Hg = spec.height;
  const std::size_t S = W * Hg;
  constexpr std::size_t A = 4;
  Rng rng(spec.seed);

  std::vector<double> cell_reward(S, 0.0);
  for (State s = 0; s < S; ++s) {
    if (rng.uniform() < spec.reward_density) cell_reward[s] = rng.uniform();
  }
  cell_reward[S - 1] = 1.0;

  std::vector<double> rewards(S * A);
  std::vector<std::vector<Transition>> rows;
  rows.reserve(S * A);
  for (State s = 0; s < S; ++s) {
    const std::size_t x = s % W;
    const std::size_t y = s / W;
    for (Action a = 0; a < A; ++a) {
      rewards[s * A + a] = cell_reward[s];
      std::size_t nx = x;
      std::size_t ny = y;
      if (a == 0 && y + 1 < Hg) ++ny;
      if (a == 1 && y > 0) --ny;
      if (a == 2 && x > 0) --nx;
      if (a == 3 && x + 1 < W) ++nx;
      const State target = ny * W + nx;
      if (spec.slip > 0.0 && target != s) {
        rows.push_back({{s, spec.slip}, {target, 1.0 - spec.slip}});
      } else {
        rows.push_back({{target, 1.0}});
      }
    }
  }
  return Mdp(S, A, spec.horizon, std::move(rewards), std::move(rows), spec.init);
}

// k distinct states from [0, n), uniformly, via a partial Fisher-Yates shuffle.
std::vector<State> draw_support(Rng& rng, std::size_t n, std::size_t k) {
  std::vector<State> pool(n);
  for (State i = 0; i < n; ++i) pool[i] = i;
  for (std::size_t i = 0; i < k; ++i) {
    const std::size_t j = i + static_cast<std::size_t>(rng.below(n - i));
    std::swap(pool[i], pool[j]);
  }
  pool.resize(k);
  return pool;
}

std::vector<Transition> normalized_row(Rng& rng, const std::vector<State>& support) {
  std::vector<Transition> row;
  double total = 0.0;
  for (State x : support) {
    const double w = 1.0 - rng.uniform();  // (0, 1]
    row.push_back({x, w});
    total += w;
  }
  for (Transition& tr : row) tr.prob /= total;
  return row;
}

Mdp gen_random(const GenSpec& spec) {
  const std::size_t S = spec.num_states;
  const std::size_t A = spec.num_actions;
  Rng rng(spec.seed);
  std::vector<double> rewards(S * A, 0.0);
  std::vector<std::vector<Transition>> rows;
  rows.reserve(S * A);
  for (State s = 0; s < S; ++s) {
    for (Action a = 0; a < A; ++a) {
      if (rng.uniform() < spec.reward_density) rewards[s * A + a] = rng.uniform();
      const std::size_t k = 1 + static_cast<std::size_t>(rng.below(spec.branching));
      rows.push_back(normalized_row(rng, draw_support(rng, S, k)));
    }
  }
  return Mdp(S, A, spec.horizon, std::move(rewards), std::move(rows), spec.init);
}

}  // namespace

Mdp gen(const GenSpec& spec) {
  if (spec.horizon == 0) throw ConfigError("gen: horizon must be positive");
  if (!(spec.reward_density >= 0.0 && spec.reward_density <= 1.0)) {
    throw ConfigError("gen: reward_density must lie in [0, 1]");
  }
  if (!(spec.slip >= 0.0 && spec.slip < 1.0)) throw ConfigError("gen: slip must lie in [0, 1)");

  Mdp m = [&] {
    switch (spec.family) {
      case Family::kChain:
        if (spec.num_states == 0) throw ConfigError("gen: chain needs at least one state");
        return gen_chain(spec);
      case Family::kGridworld:
        if (spec.width == 0 || spec.height == 0) throw ConfigError("gen: gridworld needs positive width and height");
        return gen_gridworld(spec);
      case Family::kRandom:
        if (spec.num_states == 0 || spec.num_actions == 0) {
          throw ConfigError("gen: random family needs positive num_states and num_actions");
        }
        if (spec.branching == 0 || spec.branching > spec.num_states) {
          throw ConfigError("gen: branching must lie in [1, num_states]");
        }
        return gen_random(spec);
    }
    throw ConfigError("gen: unknown family");
  }();
  require_valid(m);
  return m;
}

std::vector<Transition> mix_rows(std::span<const Transition> p, std::span<const Transition> q, double alpha) {
  std::map<State, double> merged;
  for (const Transition& tr : p) merged[tr.next] += (1.0 - alpha) * tr.prob;
  for (const Transition& tr : q) merged[tr.next] += alpha * tr.prob;
  std::vector<Transition> out;
  for (const auto& [x, prob] : merged) {
    if (prob > 0.0) out.push_back({x, prob});
  }
  return out;
}

double l1_distance(std::span<const Transition> p, std::span<const Transition> q) {
  std::map<State, double> diff;
  for (const Transition& tr : p) diff[tr.next] += tr.prob;
  for (const Transition& tr : q) diff[tr.next] -= tr.prob;
  double total = 0.0;
  for (const auto& [x, d] : diff) total += std::abs(d);
  return total;
}

Mdp perturb_model(const Mdp& m, double eps_p, std::uint64_t seed) {
  if (!(eps_p >= 0.0 && eps_p <= 2.0)) throw ConfigError("perturb_model: eps_P must lie in [0, 2]");
  require_valid(m);
  if (eps_p == 0.0) return m;

  const double alpha = eps_p / 2.0;
  Rng rng(seed);
  std::vector<std::vector<Transition>> rows;
  rows.reserve(m.num_states() * m.num_actions());
  for (State s = 0; s < m.num_states(); ++s) {
    for (Action a = 0; a < m.num_actions(); ++a) {
      const auto p = m.row(s, a);
      std::vector<State> support;
      for (const Transition& tr : p) support.push_back(tr.next);
      const auto extra = static_cast<State>(rng.below(m.num_states()));
      if (std::find(support.begin(), support.end(), extra) == support.end()) support.push_back(extra);
      const std::vector<Transition> q = normalized_row(rng, support);
      std::vector<Transition> mixed = mix_rows(p, q, alpha);
      if (l1_distance(p, mixed) > eps_p + 1e-12) {
        throw std::logic_error("perturb_model: l1 distance exceeds eps_P");
      }
      rows.push_back(std::move(mixed));
    }
  }
  Mdp out = m.with_rows(std::move(rows));
  require_valid(out);
  return out;
}

ValueNoise make_value_noise(double eps_v, std::uint64_t seed) {
  if (!(eps_v >= 0.0)) throw ConfigError("make_value_noise: eps_V must be nonnegative");
  return ValueNoise(eps_v, seed);
}

AbstractionMap build_abstraction(const Mdp& m, std::size_t h, double eps_a) {
  if (!(eps_a >= 0.0)) throw ConfigError("build_abstraction: eps_A must be nonnegative");
  if (h == 0 || m.horizon() % h != 0) throw ConfigError("build_abstraction: h must divide H");
  const FullValueFunction vstar = optimal_values(m);
  const std::size_t checkpoints = m.horizon() / h + 1;

  std::vector<std::vector<std::size_t>> maps;
  std::size_t num_abstract = 0;
  for (std::size_t n = 0; n < checkpoints; ++n) {
    const auto v = vstar.row(n * h + 1);
    // Ordered keys give abstract ids in increasing value order.
    std::map<double, std::size_t> bucket_ids;
    const auto key = [&](double x) { return eps_a > 0.0 ? std::floor(x / eps_a) : x; };
    for (double x : v) bucket_ids.emplace(key(x), 0);
    std::size_t next_id = 0;
    for (auto& [k, id] : bucket_ids) id = next_id++;
    std::vector<std::size_t> map(m.num_states());
    for (State s = 0; s < m.num_states(); ++s) map[s] = bucket_ids.at(key(v[s]));
    num_abstract = std::max(num_abstract, next_id);
    maps.push_back(std::move(map));
  }
  AbstractionMap out(std::move(maps), num_abstract);
  if (abstraction_spread(m, h, out) > eps_a) {
    throw std::logic_error("build_abstraction: class spread exceeds eps_A");
  }
  return out;
}

double abstraction_spread(const Mdp& m, std::size_t h, const AbstractionMap& map) {
  const FullValueFunction vstar = optimal_values(m);
  double worst = 0.0;
  for (std::size_t n = 0; n < map.num_checkpoints(); ++n) {
    std::vector<double> lo(map.num_abstract(), INFINITY);
    std::vector<double> hi(map.num_abstract(), -INFINITY);
    for (State s = 0; s < m.num_states(); ++s) {
      const double v = vstar(n * h + 1, s);
      const std::size_t c = map(n, s);
      lo[c] = std::min(lo[c], v);
      hi[c] = std::max(hi[c], v);
    }
    for (std::size_t c = 0; c < map.num_abstract(); ++c) {
      if (hi[c] >= lo[c]) worst = std::max(worst, hi[c] - lo[c]);
    }
  }
  return worst;
}

Mdp replicate(const Mdp& m, std::size_t copies) {
  if (copies == 0) throw ConfigError("replicate: need at least one copy");
  const std::size_t S = m.num_states();
  const std::size_t A = m.num_actions();
  std::vector<double> rewards;
  std::vector<std::vector<Transition>> rows;
  for (std::size_t c = 0; c < copies; ++c) {
    for (State s = 0; s < S; ++s) {
      for (Action a = 0; a < A; ++a) {
        rewards.push_back(m.reward(s, a));
        std::vector<Transition> row;
        for (const Transition& tr : m.row(s, a)) row.push_back({tr.next + c * S, tr.prob});
        rows.push_back(std::move(row));
      }
    }
  }
  InitSchedule init = m.init();
  if (init.kind != InitSchedule::Kind::kFixed && init.limit == 0) init.limit = S;
  return Mdp(S * copies, A, m.horizon(), std::move(rewards), std::move(rows), init);
}

}  // namespace hrtdp
