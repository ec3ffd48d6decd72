#include "hrtdp/mdp.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "hrtdp/errors.hpp"

namespace hrtdp {

std::uint64_t Rng::below(std::uint64_t n) {
  // Rejection sampling over the raw engine output.
  const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % n);
  std::uint64_t x = engine_();
  while (x >= limit) x = engine_();
  return x % n;
}

State InitSchedule::start_state(std::size_t episode, std::size_t num_states) const {
  const std::size_t span = (limit == 0 || limit > num_states) ? num_states : limit;
  switch (kind) {
    case Kind::kFixed:
      return state;
    case Kind::kRoundRobin:
      return (state + episode - 1) % span;
    case Kind::kRandom:
      return static_cast<State>(counter_uniform(seed, episode, 0) * static_cast<double>(span));
  }
  return state;
}

Mdp::Mdp(std::size_t num_states, std::size_t num_actions, std::size_t horizon,
         std::vector<double> rewards, std::vector<std::vector<Transition>> rows, InitSchedule init)
    : num_states_(num_states),
      num_actions_(num_actions),
      horizon_(horizon),
      rewards_(std::move(rewards)),
      init_(init) {
  if (num_states == 0 || num_actions == 0 || horizon == 0) {
    throw ConfigError("Mdp: S, A and H must be positive");
  }
  const std::size_t pairs = num_states * num_actions;
  if (rewards_.size() != pairs) throw ConfigError("Mdp: rewards must have S*A entries");
  if (rows.size() != pairs) throw ConfigError("Mdp: transitions must have S*A rows");

  offsets_.reserve(pairs + 1);
  offsets_.push_back(0);
  for (auto& r : rows) {
    std::stable_sort(r.begin(), r.end(),
                     [](const Transition& x, const Transition& y) { return x.next < y.next; });
    for (const Transition& tr : r) {
      if (tr.prob == 0.0) continue;
      if (!transitions_.empty() && transitions_.size() > offsets_.back() &&
          transitions_.back().next == tr.next) {
        transitions_.back().prob += tr.prob;
      } else {
        transitions_.push_back(tr);
      }
    }
    offsets_.push_back(transitions_.size());
  }
}

std::size_t Mdp::max_branching() const {
  std::size_t best = 0;
  for (std::size_t i = 0; i + 1 < offsets_.size(); ++i) best = std::max(best, offsets_[i + 1] - offsets_[i]);
  return best;
}

std::vector<std::vector<Transition>> Mdp::rows() const {
  std::vector<std::vector<Transition>> out;
  out.reserve(num_states_ * num_actions_);
  for (std::size_t i = 0; i + 1 < offsets_.size(); ++i) {
    out.emplace_back(transitions_.begin() + static_cast<std::ptrdiff_t>(offsets_[i]),
                     transitions_.begin() + static_cast<std::ptrdiff_t>(offsets_[i + 1]));
  }
  return out;
}

Mdp Mdp::with_init(InitSchedule init) const {
  Mdp copy = *this;
  copy.init_ = init;
  return copy;
}

Mdp Mdp::with_rows(std::vector<std::vector<Transition>> rows) const {
  return Mdp(num_states_, num_actions_, horizon_, rewards_, std::move(rows), init_);
}

ValidationReport validate_mdp(const Mdp& m) {
  ValidationReport report;
  for (State s = 0; s < m.num_states(); ++s) {
    for (Action a = 0; a < m.num_actions(); ++a) {
      const double r = m.reward(s, a);
      if (!(r >= 0.0 && r <= 1.0)) report.push_back({s, a, "reward out of [0,1]"});

      double sum = 0.0;
      bool negative = false;
      bool out_of_range = false;
      for (const Transition& tr : m.row(s, a)) {
        if (!(tr.prob >= 0.0)) negative = true;
        if (tr.next >= m.num_states()) out_of_range = true;
        sum += tr.prob;
      }
      if (negative) report.push_back({s, a, "negative probability"});
      if (out_of_range) report.push_back({s, a, "successor out of range"});
      if (!(std::abs(sum - 1.0) <= 1e-12)) report.push_back({s, a, "row sum != 1"});
    }
  }
  const InitSchedule& init = m.init();
  if (init.kind == InitSchedule::Kind::kFixed && init.state >= m.num_states()) {
    report.push_back({init.state, 0, "initial state out of range"});
  }
  return report;
}

void require_valid(const Mdp& m) {
  const ValidationReport report = validate_mdp(m);
  if (report.empty()) return;
  std::ostringstream msg;
  msg << "invalid MDP (" << report.size() << " violations)";
  for (std::size_t i = 0; i < report.size() && i < 5; ++i) {
    msg << "; (" << report[i].state << ", " << report[i].action << "): " << report[i].message;
  }
  throw ValidationError(msg.str());
}

std::span<const Transition> successors(const Mdp& m, State s, Action a) {
  if (s >= m.num_states() || a >= m.num_actions()) {
    throw std::out_of_range("successors: state or action index out of range");
  }
  return m.row(s, a);
}

FullValueFunction optimal_values(const Mdp& m) {
  require_valid(m);
  const std::size_t H = m.horizon();
  FullValueFunction v(H, m.num_states());
  for (std::size_t t = H; t >= 1; --t) {
    const auto next = v.row(t + 1);
    for (State s = 0; s < m.num_states(); ++s) {
      v.at(t, s) = greedy_backup(m, s, [&](State x) { return next[x]; }).value;
    }
  }
  return v;
}

FullValueFunction evaluate_policy(const Mdp& m, const NonstationaryPolicy& pi) {
  require_valid(m);
  if (pi.horizon() != m.horizon() || pi.num_states() != m.num_states()) {
    throw ContractError("evaluate_policy: policy shape does not match the MDP");
  }
  const std::size_t H = m.horizon();
  FullValueFunction v(H, m.num_states());
  for (std::size_t t = H; t >= 1; --t) {
    const auto next = v.row(t + 1);
    for (State s = 0; s < m.num_states(); ++s) {
      const Action a = pi(s, t);
      if (a >= m.num_actions()) throw ContractError("evaluate_policy: action out of range");
      v.at(t, s) = q_value(m, s, a, [&](State x) { return next[x]; });
    }
  }
  return v;
}

State sample_successor(std::span<const Transition> row, double u) {
  if (row.empty()) throw ContractError("sample_successor: empty transition row");
  double cdf = 0.0;
  for (const Transition& tr : row) {
    cdf += tr.prob;
    if (u < cdf) return tr.next;
  }
  // Rounding can leave the total a hair below 1.
  return row.back().next;
}

State sample_transition(const Mdp& m, State s, Action a, Rng& rng) {
  return sample_successor(successors(m, s, a), rng.uniform());
}

Mdp chain3() {
  constexpr std::size_t S = 3;
  std::vector<double> rewards(S * 2, 0.0);
  std::vector<std::vector<Transition>> rows;
  for (State s = 0; s < S; ++s) {
    rewards[s * 2 + kStay] = rewards[s * 2 + kFwd] = (s == 2) ? 1.0 : 0.0;
    rows.push_back({{s, 1.0}});
    rows.push_back({{std::min<State>(s + 1, 2), 1.0}});
  }
  return Mdp(S, 2, 2, std::move(rewards), std::move(rows), InitSchedule::round_robin());
}

}  // namespace hrtdp
