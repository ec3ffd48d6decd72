#pragma once

#include <filesystem>
#include <string>

#include "hrtdp/mdp.hpp"

namespace hrtdp {

// JSON MDP format:
//   {"S": int, "A": int, "H": int,
//    "rewards": [[float]]            (S rows of A entries),
//    "transitions": [{"s": int, "a": int, "to": [[int, float], ...]}],
//    "init": {"kind": "fixed"|"round_robin"|"random", "state": int?, "seed": int?}}
//
// Parsing applies validate_mdp and throws ValidationError on violations.
// Malformed documents throw ConfigError naming the offending field.
Mdp parse_mdp(const std::string& json_text);
Mdp load_mdp(const std::filesystem::path& path);

std::string mdp_to_json(const Mdp& m);
void save_mdp(const Mdp& m, const std::filesystem::path& path);

}  // namespace hrtdp
