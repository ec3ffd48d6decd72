#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "hrtdp/mdp.hpp"
#include "hrtdp/random.hpp"

namespace hrtdp {

enum class VariantKind { kExact, kApproxModel, kApproxValue, kApproxAbstraction };

std::string to_string(VariantKind kind);
VariantKind variant_kind_from_string(const std::string& name);

// Bounded additive error applied to value updates: a pure function of
// (state, episode) with values in [-bound, bound].
class ValueNoise {
 public:
  ValueNoise(double bound, std::uint64_t seed) : bound_(bound), seed_(seed) {}

  double operator()(State s, std::size_t episode) const {
    if (bound_ == 0.0) return 0.0;
    return bound_ * (2.0 * counter_uniform(seed_, s, episode) - 1.0);
  }

  double bound() const { return bound_; }
  std::uint64_t seed() const { return seed_; }

 private:
  double bound_;
  std::uint64_t seed_;
};

// Per-checkpoint state abstraction phi_{nh+1} for n = 0 .. H/h.
class AbstractionMap {
 public:
  AbstractionMap(std::vector<std::vector<std::size_t>> maps, std::size_t num_abstract);

  static AbstractionMap identity(std::size_t num_states, std::size_t num_checkpoints);

  std::span<const std::size_t> phi(std::size_t checkpoint) const { return maps_.at(checkpoint); }
  std::size_t operator()(std::size_t checkpoint, State s) const { return maps_.at(checkpoint).at(s); }
  std::size_t num_abstract() const { return num_abstract_; }
  std::size_t num_checkpoints() const { return maps_.size(); }
  std::size_t num_states() const { return maps_.empty() ? 0 : maps_.front().size(); }

  // Concrete states grouped with s at the given checkpoint.
  std::vector<State> equivalence_class(std::size_t checkpoint, State s) const;

 private:
  std::vector<std::vector<std::size_t>> maps_;
  std::size_t num_abstract_;
};

// Which planner variant runs, with the auxiliary object and error bound it needs.
struct VariantSpec {
  VariantKind kind = VariantKind::kExact;
  std::shared_ptr<const Mdp> approx_model;        // approx-model only
  std::optional<ValueNoise> value_noise;          // approx-value only
  std::optional<AbstractionMap> abstraction;      // approx-abstraction only
  double eps_p = 0.0;
  double eps_v = 0.0;
  double eps_a = 0.0;

  static VariantSpec exact() { return {}; }
  static VariantSpec approx_model_of(Mdp model, double eps_p);
  static VariantSpec approx_value(ValueNoise noise);
  static VariantSpec approx_abstraction(AbstractionMap map, double eps_a);

  // Throws ConfigError when the fields do not match the kind or do not fit
  // the environment (model shape, abstraction checkpoints).
  void validate(const Mdp& env, std::size_t h) const;

  // Model used for lookahead and updates: the approximate model for AM,
  // the environment otherwise.
  const Mdp& planning_model(const Mdp& env) const;

  // Asymptotic per-episode error level for this variant:
  // 0, H(H-1)eps_P, 2H eps_V / h, H eps_A / h.
  double asymptotic_gap(std::size_t H, std::size_t h) const;
};

}  // namespace hrtdp
