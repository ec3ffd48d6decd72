#include "hrtdp/adp.hpp"

#include <algorithm>
#include <limits>

#include "hrtdp/errors.hpp"
#include "hrtdp/planner.hpp"

namespace hrtdp {

double gap_bound(VariantKind kind, std::size_t H, std::size_t h, double eps) {
  if (eps < 0.0) throw ConfigError("gap_bound: eps must be nonnegative");
  if (h == 0 || H % h != 0) throw ConfigError("gap_bound: h must divide H");
  const double Hd = static_cast<double>(H);
  const double hd = static_cast<double>(h);
  switch (kind) {
    case VariantKind::kExact:
      return 0.0;
    case VariantKind::kApproxModel:
      return Hd * (Hd - 1.0) * eps;
    case VariantKind::kApproxValue:
      return 2.0 * Hd * eps / hd;
    case VariantKind::kApproxAbstraction:
      return Hd * eps / hd;
  }
  return 0.0;
}

AdpResult h_dp(const Mdp& m, std::size_t h, const VariantSpec& variant) {
  require_valid(m);
  variant.validate(m, h);
  const Mdp& plan = variant.planning_model(m);
  if (&plan != &m) require_valid(plan);

  const std::size_t S = m.num_states();
  const std::size_t H = m.horizon();
  ValueTable table(table_width(m, variant), H, h);
  std::size_t backups = 0;

  std::vector<double> next(S);
  std::vector<double> current(S);
  const auto lookup = [&next](State x) { return next[x]; };
  for (std::size_t n = H / h; n-- > 0;) {
    // T^h of checkpoint n+1 over the whole state space.
    for (State s = 0; s < S; ++s) {
      next[s] = variant.kind == VariantKind::kApproxAbstraction
                    ? table.get(n + 1, (*variant.abstraction)(n + 1, s))
                    : table.get(n + 1, s);
    }
    for (std::size_t step = 0; step < h; ++step) {
      for (State s = 0; s < S; ++s) current[s] = greedy_backup(plan, s, lookup).value;
      backups += S;
      std::swap(current, next);
    }

    for (State s = 0; s < S; ++s) {
      switch (variant.kind) {
        case VariantKind::kExact:
        case VariantKind::kApproxModel:
          table.set(n, s, next[s]);
          break;
        case VariantKind::kApproxValue:
          table.set(n, s, std::min((*variant.value_noise)(s, n) + next[s], table.get(n, s)));
          break;
        case VariantKind::kApproxAbstraction: {
          const std::size_t cell = (*variant.abstraction)(n, s);
          table.set(n, cell, std::min(next[s], table.get(n, cell)));
          break;
        }
      }
    }
  }

  NonstationaryPolicy policy = materialize_policy(plan, table, variant);
  FullValueFunction policy_values = evaluate_policy(m, policy);
  const FullValueFunction vstar = optimal_values(m);
  double gap = -std::numeric_limits<double>::infinity();
  for (State s = 0; s < S; ++s) gap = std::max(gap, vstar(1, s) - policy_values(1, s));

  const double eps = variant.kind == VariantKind::kApproxModel   ? variant.eps_p
                     : variant.kind == VariantKind::kApproxValue ? variant.eps_v
                                                                 : variant.eps_a;
  return AdpResult{std::move(table), std::move(policy), std::move(policy_values), gap,
                   gap_bound(variant.kind, H, h, eps), backups};
}

}  // namespace hrtdp
