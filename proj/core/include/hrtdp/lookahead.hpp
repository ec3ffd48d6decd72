#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <unordered_map>
#include <vector>

#include "hrtdp/mdp.hpp"

namespace hrtdp {

// Value attached to the states reached at the end of a lookahead. A lookup
// may come back empty, which the solvers report as a ContractError.
class Terminal {
 public:
  static Terminal zero() { return constant(0.0); }
  static Terminal constant(double c);
  // Views: the referenced storage must outlive the Terminal.
  static Terminal dense(std::span<const double> values);
  static Terminal abstract(std::span<const double> abstract_values, std::span<const std::size_t> phi);
  static Terminal sparse(std::unordered_map<State, double> values);
  static Terminal function(std::function<std::optional<double>(State)> fn);

  std::optional<double> operator()(State s) const;

 private:
  enum class Kind { kConstant, kDense, kAbstract, kSparse, kFunction };
  Kind kind_ = Kind::kConstant;
  double constant_ = 0.0;
  std::span<const double> values_;
  std::span<const std::size_t> phi_;
  std::unordered_map<State, double> sparse_;
  std::function<std::optional<double>(State)> fn_;
};

// Per-depth reachable sets S_1(s) .. S_{h+1}(s); each layer sorted ascending.
struct ReachSets {
  State origin = 0;
  std::size_t depth = 0;
  std::vector<std::vector<State>> layers;  // layers[t-1] is S_t(s)
  std::size_t total_up_to_h = 0;           // sum_{t=1}^{h} |S_t(s)|
  std::size_t max_branching = 0;           // largest successor count met while expanding

  const std::vector<State>& layer(std::size_t t) const { return layers.at(t - 1); }
};

struct LookaheadResult {
  Action action = 0;
  double root_value = 0.0;
  std::size_t backups_performed = 0;

  friend bool operator==(const LookaheadResult&, const LookaheadResult&) = default;
};

ReachSets forward_pass(const Mdp& m, State s, std::size_t h);
LookaheadResult backward_pass(const ReachSets& rs, const Mdp& m, const Terminal& terminal, std::size_t h);

// Forward-Backward DP: forward_pass followed by backward_pass.
LookaheadResult lookahead_action(const Mdp& m, State s, std::size_t h, const Terminal& terminal);

// (T^h terminal)(s); h = 0 returns terminal(s).
double h_bellman(const Mdp& m, State s, std::size_t h, const Terminal& terminal);

LookaheadResult abstract_lookahead(const Mdp& m, State s, std::size_t h,
                                   std::span<const double> terminal_abs,
                                   std::span<const std::size_t> phi);

// Size limits for the exhaustive oracle.
struct ExhaustiveGuard {
  std::size_t max_reachable = 12;  // sum_{t=1}^{h} |S_t(s)|
  std::size_t max_actions = 4;
  std::size_t max_depth = 4;
};

// Enumerates every deterministic nonstationary policy over the reachable
// states and returns the best first action (lowest index among values within
// 1e-9 of the maximum). Testing oracle for lookahead_action; refuses
// instances outside the guard.
LookaheadResult exhaustive_lookahead(const Mdp& m, State s, std::size_t h, const Terminal& terminal,
                                     const ExhaustiveGuard& guard = {});

}  // namespace hrtdp
