#pragma once

// JSON helpers shared by the io and harness translation units.

#include <filesystem>
#include <string>

#include <json.hpp>

#include "hrtdp/mdp.hpp"

namespace hrtdp {

InitSchedule init_from_json(const nlohmann::json& j);
nlohmann::json init_to_json(const InitSchedule& init);
Mdp mdp_from_json(const nlohmann::json& j);
nlohmann::json mdp_to_json_value(const Mdp& m);

std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, const std::string& text);

}  // namespace hrtdp
