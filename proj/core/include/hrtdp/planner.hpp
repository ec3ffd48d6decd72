#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "hrtdp/lookahead.hpp"
#include "hrtdp/mdp.hpp"
#include "hrtdp/value_table.hpp"
#include "hrtdp/variant.hpp"

namespace hrtdp {

// Number of entries each checkpoint array of the variant holds: S, or S_phi
// under an abstraction.
std::size_t table_width(const Mdp& env, const VariantSpec& variant);

// Terminal values of checkpoint n, read through phi_n for the abstraction variant.
Terminal checkpoint_terminal(const ValueTable& table, std::size_t n, const VariantSpec& variant);

// Lookahead from (s, t) with the remaining depth t_c = h_c - t against the
// next checkpoint h_c. m_plan is the model the variant plans with.
LookaheadResult act_lookahead(const Mdp& m_plan, const ValueTable& table, State s, std::size_t t,
                              const VariantSpec& variant);

Action act(const Mdp& m_plan, const ValueTable& table, State s, std::size_t t, const VariantSpec& variant);

struct UpdateResult {
  double value = 0.0;          // value written at the (abstract) entry
  LookaheadResult lookahead;   // the h-step backup it was computed from
};

// Checkpoint update at time t (a checkpoint time <= H) for the visited state.
//   exact / AM: T^h of the next checkpoint (no clamp)
//   AV: min(noise(s, episode) + T^h, old)
//   AA: min(T_phi^h, old), written at phi_t(s)
UpdateResult checkpoint_update_detail(const Mdp& m_plan, ValueTable& table, State s, std::size_t t,
                                      const VariantSpec& variant, std::size_t episode);

double checkpoint_update(const Mdp& m_plan, ValueTable& table, State s, std::size_t t,
                         const VariantSpec& variant, std::size_t episode);

// The nonstationary policy that act() follows for every (s, t) given the
// table. Computed by dense backward induction between checkpoints, which
// performs the same per-state backups as the lookahead solver.
NonstationaryPolicy materialize_policy(const Mdp& m_plan, const ValueTable& table, const VariantSpec& variant);

struct EpisodeRecord {
  std::size_t episode = 0;
  State start = 0;
  std::vector<State> states;    // s_1 .. s_{H+1}
  std::vector<Action> actions;  // a_1 .. a_H
  double regret = 0.0;          // V*_1(s_1) - V^{pi_k}_1(s_1)
  double policy_value = 0.0;    // V^{pi_k}_1(s_1) on the true MDP
  double root_value = 0.0;      // value written at checkpoint 1 this episode
  double value_sum_before = 0.0;
  double value_sum = 0.0;       // X after the episode's updates
  std::size_t backups = 0;
  std::size_t updates = 0;

  friend bool operator==(const EpisodeRecord&, const EpisodeRecord&) = default;
};

struct RunLog {
  std::uint64_t seed = 0;
  std::size_t lookahead = 1;
  VariantKind kind = VariantKind::kExact;
  std::size_t table_entries = 0;
  double initial_value_sum = 0.0;
  double value_sum_floor = 0.0;  // lower bound on X implied by the variant's optimism
  std::vector<EpisodeRecord> episodes;
  std::vector<std::pair<std::size_t, ValueTable>> snapshots;
  std::vector<std::string> violations;

  std::vector<double> regrets() const;
  double total_regret() const;

  friend bool operator==(const RunLog&, const RunLog&) = default;
};

struct RunOptions {
  std::size_t episodes = 1;
  std::uint64_t seed = 0;
  std::vector<std::size_t> snapshot_episodes;
  // Check optimism, monotone decrease and (deterministic exact runs) the
  // optimality-gap identity after every episode; failures go to RunLog::violations.
  bool monitor = false;
  double tolerance = 1e-9;
  // Starting table; defaults to optimistic initialization.
  std::optional<ValueTable> initial_table;
};

// Online h-RTDP (exact or approximate) against the true dynamics `env`.
RunLog run_h_rtdp(const Mdp& env, const VariantSpec& variant, std::size_t h, const RunOptions& options);

// Plain RTDP with a value per time step; equivalent to exact h-RTDP with h = 1.
RunLog run_rtdp(const Mdp& env, const RunOptions& options);

}  // namespace hrtdp
