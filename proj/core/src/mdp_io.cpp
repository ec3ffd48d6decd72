#include "hrtdp/mdp_io.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "hrtdp/errors.hpp"
#include "json_convert.hpp"

namespace hrtdp {

using nlohmann::json;

namespace {

std::size_t get_count(const json& j, const char* key) {
  if (!j.contains(key) || !j.at(key).is_number_integer() || j.at(key).get<long long>() <= 0) {
    throw ConfigError(std::string("mdp: field '") + key + "' must be a positive integer");
  }
  return j.at(key).get<std::size_t>();
}

}  // namespace

InitSchedule init_from_json(const json& j) {
  InitSchedule init;
  const std::string kind = j.value("kind", std::string("round_robin"));
  if (kind == "fixed") {
    if (!j.contains("state")) throw ConfigError("init: 'fixed' requires 'state'");
    init = InitSchedule::fixed(j.at("state").get<State>());
  } else if (kind == "round_robin") {
    init = InitSchedule::round_robin(j.value("limit", std::size_t{0}));
    init.state = j.value("state", State{0});
  } else if (kind == "random") {
    init = InitSchedule::random(j.value("seed", std::uint64_t{0}), j.value("limit", std::size_t{0}));
  } else {
    throw ConfigError("init: unknown kind '" + kind + "'");
  }
  return init;
}

json init_to_json(const InitSchedule& init) {
  json j;
  switch (init.kind) {
    case InitSchedule::Kind::kFixed:
      j = {{"kind", "fixed"}, {"state", init.state}};
      break;
    case InitSchedule::Kind::kRoundRobin:
      j = {{"kind", "round_robin"}};
      if (init.state != 0) j["state"] = init.state;
      break;
    case InitSchedule::Kind::kRandom:
      j = {{"kind", "random"}, {"seed", init.seed}};
      break;
  }
  if (init.kind != InitSchedule::Kind::kFixed && init.limit != 0) j["limit"] = init.limit;
  return j;
}

Mdp mdp_from_json(const json& j) {
  if (!j.is_object()) throw ConfigError("mdp: document must be a JSON object");
  const std::size_t S = get_count(j, "S");
  const std::size_t A = get_count(j, "A");
  const std::size_t H = get_count(j, "H");

  if (!j.contains("rewards") || !j.at("rewards").is_array() || j.at("rewards").size() != S) {
    throw ConfigError("mdp: field 'rewards' must be an S x A array");
  }
  std::vector<double> rewards;
  rewards.reserve(S * A);
  for (std::size_t s = 0; s < S; ++s) {
    const json& row = j.at("rewards")[s];
    if (!row.is_array() || row.size() != A) {
      throw ConfigError("mdp: rewards[" + std::to_string(s) + "] must have A entries");
    }
    for (const json& r : row) rewards.push_back(r.get<double>());
  }

  std::vector<std::vector<Transition>> rows(S * A);
  std::vector<bool> seen(S * A, false);
  if (!j.contains("transitions") || !j.at("transitions").is_array()) {
    throw ConfigError("mdp: field 'transitions' must be an array");
  }
  for (const json& entry : j.at("transitions")) {
    if (entry.contains("t")) {
      throw ConfigError("mdp: time-dependent transitions are not supported");
    }
    const auto s = entry.at("s").get<std::size_t>();
    const auto a = entry.at("a").get<std::size_t>();
    if (s >= S || a >= A) {
      throw ConfigError("mdp: transition entry (" + std::to_string(s) + ", " + std::to_string(a) +
                        ") out of range");
    }
    if (seen[s * A + a]) {
      throw ConfigError("mdp: duplicate transition entry (" + std::to_string(s) + ", " +
                        std::to_string(a) + ")");
    }
    seen[s * A + a] = true;
    for (const json& pair : entry.at("to")) {
      if (!pair.is_array() || pair.size() != 2) throw ConfigError("mdp: 'to' entries are [state, prob]");
      rows[s * A + a].push_back({pair[0].get<State>(), pair[1].get<double>()});
    }
  }

  InitSchedule init = j.contains("init") ? init_from_json(j.at("init")) : InitSchedule::round_robin();
  Mdp m(S, A, H, std::move(rewards), std::move(rows), init);
  require_valid(m);
  return m;
}

json mdp_to_json_value(const Mdp& m) {
  json rewards = json::array();
  for (State s = 0; s < m.num_states(); ++s) {
    json row = json::array();
    for (Action a = 0; a < m.num_actions(); ++a) row.push_back(m.reward(s, a));
    rewards.push_back(std::move(row));
  }
  json transitions = json::array();
  for (State s = 0; s < m.num_states(); ++s) {
    for (Action a = 0; a < m.num_actions(); ++a) {
      json to = json::array();
      for (const Transition& tr : m.row(s, a)) to.push_back(json::array({tr.next, tr.prob}));
      transitions.push_back({{"s", s}, {"a", a}, {"to", std::move(to)}});
    }
  }
  return {{"S", m.num_states()},   {"A", m.num_actions()},         {"H", m.horizon()},
          {"rewards", rewards},    {"transitions", transitions},    {"init", init_to_json(m.init())}};
}

Mdp parse_mdp(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("mdp: malformed JSON: ") + e.what());
  }
  try {
    return mdp_from_json(j);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("mdp: ") + e.what());
  }
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  std::error_code ec;
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path(), ec);
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write '" + path.string() + "'");
  out << text;
}

Mdp load_mdp(const std::filesystem::path& path) {
  try {
    return parse_mdp(read_text_file(path));
  } catch (const ConfigError& e) {
    throw ConfigError(path.string() + ": " + e.what());
  } catch (const ValidationError& e) {
    throw ValidationError(path.string() + ": " + e.what());
  }
}

std::string mdp_to_json(const Mdp& m) { return mdp_to_json_value(m).dump(); }

void save_mdp(const Mdp& m, const std::filesystem::path& path) { write_text_file(path, mdp_to_json(m) + "\n"); }

}  // namespace hrtdp
