#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "hrtdp/random.hpp"

namespace hrtdp {

using State = std::size_t;
using Action = std::size_t;

struct Transition {
  State next;
  double prob;

  friend bool operator==(const Transition&, const Transition&) = default;
};

// How s_1^k is chosen at the start of episode k (k counts from 1).
struct InitSchedule {
  enum class Kind { kFixed, kRoundRobin, kRandom };

  Kind kind = Kind::kRoundRobin;
  State state = 0;          // fixed: the start state; round-robin: the offset
  std::uint64_t seed = 0;   // random only
  std::size_t limit = 0;    // round-robin/random cycle over [0, limit); 0 means S

  static InitSchedule fixed(State s) { return {Kind::kFixed, s, 0, 0}; }
  static InitSchedule round_robin(std::size_t limit = 0) { return {Kind::kRoundRobin, 0, 0, limit}; }
  static InitSchedule random(std::uint64_t seed, std::size_t limit = 0) {
    return {Kind::kRandom, 0, seed, limit};
  }

  State start_state(std::size_t episode, std::size_t num_states) const;

  friend bool operator==(const InitSchedule&, const InitSchedule&) = default;
};

// Tabular finite-horizon MDP with time-independent dynamics.
//
// Transition rows are stored sparse (strictly positive entries only) and sorted
// by successor index. The constructor only checks shapes; rewards and
// probabilities are checked by validate_mdp.
class Mdp {
 public:
  Mdp(std::size_t num_states, std::size_t num_actions, std::size_t horizon,
      std::vector<double> rewards, std::vector<std::vector<Transition>> rows,
      InitSchedule init = {});

  std::size_t num_states() const { return num_states_; }
  std::size_t num_actions() const { return num_actions_; }
  std::size_t horizon() const { return horizon_; }
  const InitSchedule& init() const { return init_; }

  double reward(State s, Action a) const { return rewards_[s * num_actions_ + a]; }
  std::span<const Transition> row(State s, Action a) const {
    const std::size_t i = s * num_actions_ + a;
    return {transitions_.data() + offsets_[i], offsets_[i + 1] - offsets_[i]};
  }

  // Largest one-step successor count over all (s, a).
  std::size_t max_branching() const;

  Mdp with_init(InitSchedule init) const;
  Mdp with_rows(std::vector<std::vector<Transition>> rows) const;
  std::vector<std::vector<Transition>> rows() const;
  const std::vector<double>& rewards() const { return rewards_; }

  friend bool operator==(const Mdp&, const Mdp&) = default;

 private:
  std::size_t num_states_;
  std::size_t num_actions_;
  std::size_t horizon_;
  std::vector<double> rewards_;         // S*A, row-major by state
  std::vector<std::size_t> offsets_;    // S*A + 1
  std::vector<Transition> transitions_;
  InitSchedule init_;
};

struct Violation {
  State state;
  Action action;
  std::string message;
};

using ValidationReport = std::vector<Violation>;

ValidationReport validate_mdp(const Mdp& m);

// Throws ValidationError listing the first violations when the report is non-empty.
void require_valid(const Mdp& m);

// Deterministic policy indexed by (time step t in [1, H], state).
class NonstationaryPolicy {
 public:
  NonstationaryPolicy(std::size_t horizon, std::size_t num_states, Action fill = 0)
      : horizon_(horizon), num_states_(num_states), actions_(horizon * num_states, fill) {}

  Action operator()(State s, std::size_t t) const { return actions_[(t - 1) * num_states_ + s]; }
  void set(State s, std::size_t t, Action a) { actions_[(t - 1) * num_states_ + s] = a; }

  std::size_t horizon() const { return horizon_; }
  std::size_t num_states() const { return num_states_; }

  friend bool operator==(const NonstationaryPolicy&, const NonstationaryPolicy&) = default;

 private:
  std::size_t horizon_;
  std::size_t num_states_;
  std::vector<Action> actions_;
};

// Dense V_t(s) for t in [1, H+1]; row H+1 is zero.
class FullValueFunction {
 public:
  FullValueFunction(std::size_t horizon, std::size_t num_states)
      : horizon_(horizon), num_states_(num_states), values_((horizon + 1) * num_states, 0.0) {}

  double operator()(std::size_t t, State s) const { return values_[(t - 1) * num_states_ + s]; }
  double& at(std::size_t t, State s) { return values_[(t - 1) * num_states_ + s]; }

  std::span<const double> row(std::size_t t) const {
    return {values_.data() + (t - 1) * num_states_, num_states_};
  }
  std::span<double> row(std::size_t t) { return {values_.data() + (t - 1) * num_states_, num_states_}; }

  std::size_t horizon() const { return horizon_; }
  std::size_t num_states() const { return num_states_; }

 private:
  std::size_t horizon_;
  std::size_t num_states_;
  std::vector<double> values_;
};

std::span<const Transition> successors(const Mdp& m, State s, Action a);

// r(s,a) + sum_{s'} p(s'|s,a) * next[s'], accumulated in successor order.
// Dense and reach-set restricted backups both use it and agree bit for bit.
template <typename NextValue>
double q_value(const Mdp& m, State s, Action a, NextValue&& next) {
  double acc = 0.0;
  for (const Transition& tr : m.row(s, a)) acc += tr.prob * next(tr.next);
  return m.reward(s, a) + acc;
}

struct Backup {
  Action action;
  double value;
};

// Max over actions of q_value; ties go to the lowest action index.
template <typename NextValue>
Backup greedy_backup(const Mdp& m, State s, NextValue&& next) {
  Backup best{0, q_value(m, s, 0, next)};
  for (Action a = 1; a < m.num_actions(); ++a) {
    const double q = q_value(m, s, a, next);
    if (q > best.value) best = {a, q};
  }
  return best;
}

FullValueFunction optimal_values(const Mdp& m);
FullValueFunction evaluate_policy(const Mdp& m, const NonstationaryPolicy& pi);

// Inverse-CDF selection over a sparse row given a uniform draw in [0, 1).
State sample_successor(std::span<const Transition> row, double u);
State sample_transition(const Mdp& m, State s, Action a, Rng& rng);

// S = 3 {0,1,2}, A = 2 {stay, fwd}, H = 2, fwd = min(s+1, 2), r(s,.) = 1 iff s = 2.
Mdp chain3();

inline constexpr Action kStay = 0;
inline constexpr Action kFwd = 1;

}  // namespace hrtdp
