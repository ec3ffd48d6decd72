#pragma once

#include <cstddef>

#include "hrtdp/mdp.hpp"
#include "hrtdp/value_table.hpp"
#include "hrtdp/variant.hpp"

namespace hrtdp {

struct AdpResult {
  ValueTable values;               // checkpoint values (abstract entries for AA)
  NonstationaryPolicy policy;      // h-greedy policy w.r.t. `values`
  FullValueFunction policy_values; // its exact evaluation on the true MDP
  double gap = 0.0;                // max_s V*_1(s) - V^pi_1(s)
  double bound = 0.0;              // closed-form bound for the variant
  std::size_t backups = 0;         // Bellman backups spent in the sweep
};

// Offline backward induction over checkpoints with the h-step operator,
// sweeping every concrete state:
//   exact: T^h           AM: T^h under the approximate model
//   AV:    min(noise(s, n) + T^h, H - nh)
//   AA:    abstract entry <- min(T^h through phi, current entry)
AdpResult h_dp(const Mdp& m, std::size_t h, const VariantSpec& variant);

// Gap bounds: AM H(H-1) eps, AV 2H eps / h, AA H eps / h, exact 0.
double gap_bound(VariantKind kind, std::size_t H, std::size_t h, double eps);

}  // namespace hrtdp
