#include "hrtdp/variant.hpp"

#include "hrtdp/adp.hpp"
#include "hrtdp/errors.hpp"

namespace hrtdp {

std::string to_string(VariantKind kind) {
  switch (kind) {
    case VariantKind::kExact:
      return "exact";
    case VariantKind::kApproxModel:
      return "approx_model";
    case VariantKind::kApproxValue:
      return "approx_value";
    case VariantKind::kApproxAbstraction:
      return "approx_abstraction";
  }
  return "exact";
}

VariantKind variant_kind_from_string(const std::string& name) {
  if (name == "exact") return VariantKind::kExact;
  if (name == "approx_model" || name == "am") return VariantKind::kApproxModel;
  if (name == "approx_value" || name == "av") return VariantKind::kApproxValue;
  if (name == "approx_abstraction" || name == "aa") return VariantKind::kApproxAbstraction;
  throw ConfigError("unknown variant kind '" + name + "'");
}

AbstractionMap::AbstractionMap(std::vector<std::vector<std::size_t>> maps, std::size_t num_abstract)
    : maps_(std::move(maps)), num_abstract_(num_abstract) {
  if (maps_.empty()) throw ConfigError("AbstractionMap: at least one checkpoint map is required");
  for (const auto& map : maps_) {
    if (map.size() != maps_.front().size()) throw ConfigError("AbstractionMap: maps differ in size");
    for (std::size_t x : map) {
      if (x >= num_abstract_) throw ConfigError("AbstractionMap: abstract index out of range");
    }
  }
}

AbstractionMap AbstractionMap::identity(std::size_t num_states, std::size_t num_checkpoints) {
  std::vector<std::size_t> id(num_states);
  for (std::size_t s = 0; s < num_states; ++s) id[s] = s;
  return AbstractionMap(std::vector<std::vector<std::size_t>>(num_checkpoints, id), num_states);
}

std::vector<State> AbstractionMap::equivalence_class(std::size_t checkpoint, State s) const {
  const auto map = phi(checkpoint);
  std::vector<State> out;
  for (State x = 0; x < map.size(); ++x) {
    if (map[x] == map[s]) out.push_back(x);
  }
  return out;
}

VariantSpec VariantSpec::approx_model_of(Mdp model, double eps_p) {
  VariantSpec v;
  v.kind = VariantKind::kApproxModel;
  v.approx_model = std::make_shared<const Mdp>(std::move(model));
  v.eps_p = eps_p;
  return v;
}

VariantSpec VariantSpec::approx_value(ValueNoise noise) {
  VariantSpec v;
  v.kind = VariantKind::kApproxValue;
  v.eps_v = noise.bound();
  v.value_noise = noise;
  return v;
}

VariantSpec VariantSpec::approx_abstraction(AbstractionMap map, double eps_a) {
  VariantSpec v;
  v.kind = VariantKind::kApproxAbstraction;
  v.abstraction = std::move(map);
  v.eps_a = eps_a;
  return v;
}

void VariantSpec::validate(const Mdp& env, std::size_t h) const {
  if (h == 0 || env.horizon() % h != 0) {
    throw ConfigError("lookahead h must divide the horizon H");
  }
  if (eps_p < 0.0 || eps_v < 0.0 || eps_a < 0.0) throw ConfigError("variant: error bounds must be nonnegative");

  const bool wants_model = kind == VariantKind::kApproxModel;
  const bool wants_noise = kind == VariantKind::kApproxValue;
  const bool wants_abstraction = kind == VariantKind::kApproxAbstraction;
  const std::string name = to_string(kind);
  if (wants_model != static_cast<bool>(approx_model)) {
    throw ConfigError("variant " + name + (wants_model ? " requires" : " must not carry") + " an approximate model");
  }
  if (wants_noise != value_noise.has_value()) {
    throw ConfigError("variant " + name + (wants_noise ? " requires" : " must not carry") + " a value noise source");
  }
  if (wants_abstraction != abstraction.has_value()) {
    throw ConfigError("variant " + name + (wants_abstraction ? " requires" : " must not carry") + " an abstraction");
  }

  if (approx_model) {
    const Mdp& m = *approx_model;
    if (m.num_states() != env.num_states() || m.num_actions() != env.num_actions() ||
        m.horizon() != env.horizon()) {
      throw ConfigError("variant approx_model: model shape differs from the environment");
    }
  }
  if (value_noise && value_noise->bound() > eps_v) {
    throw ConfigError("variant approx_value: noise bound exceeds eps_V");
  }
  if (abstraction) {
    if (abstraction->num_states() != env.num_states() ||
        abstraction->num_checkpoints() != env.horizon() / h + 1) {
      throw ConfigError("variant approx_abstraction: abstraction does not cover every state and checkpoint");
    }
  }
}

const Mdp& VariantSpec::planning_model(const Mdp& env) const {
  return kind == VariantKind::kApproxModel ? *approx_model : env;
}

double VariantSpec::asymptotic_gap(std::size_t H, std::size_t h) const {
  switch (kind) {
    case VariantKind::kExact:
      return 0.0;
    case VariantKind::kApproxModel:
      return gap_bound(kind, H, h, eps_p);
    case VariantKind::kApproxValue:
      return gap_bound(kind, H, h, eps_v);
    case VariantKind::kApproxAbstraction:
      return gap_bound(kind, H, h, eps_a);
  }
  return 0.0;
}

}  // namespace hrtdp
