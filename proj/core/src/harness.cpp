#include "hrtdp/harness.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "hrtdp/errors.hpp"
#include "hrtdp/mdp_io.hpp"
#include "json_convert.hpp"

namespace hrtdp {

using nlohmann::json;

namespace {

constexpr double kRegretTolerance = 1e-9;
constexpr double kApproxTolerance = 1e-6;

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

std::string family_name(Family f) {
  switch (f) {
    case Family::kChain:
      return "chain";
    case Family::kGridworld:
      return "gridworld";
    case Family::kRandom:
      return "random";
  }
  return "random";
}

template <typename T>
T field(const json& j, const char* key, T fallback, const std::string& where) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    throw ConfigError(where + ": field '" + key + "' has the wrong type");
  }
}

GenSpec gen_spec_from_json(const json& j) {
  const std::string where = "gen spec";
  if (!j.is_object()) throw ConfigError(where + ": must be a JSON object");
  GenSpec spec;
  const std::string family = field<std::string>(j, "family", "random", where);
  if (family == "chain") {
    spec.family = Family::kChain;
  } else if (family == "gridworld") {
    spec.family = Family::kGridworld;
  } else if (family == "random") {
    spec.family = Family::kRandom;
  } else {
    throw ConfigError(where + ": field 'family' must be chain, gridworld or random");
  }
  spec.num_states = field<std::size_t>(j, "S", spec.num_states, where);
  spec.width = field<std::size_t>(j, "width", 0, where);
  spec.height = field<std::size_t>(j, "height", 0, where);
  spec.num_actions = field<std::size_t>(j, "A", spec.num_actions, where);
  spec.horizon = field<std::size_t>(j, "H", spec.horizon, where);
  spec.branching = field<std::size_t>(j, "branching", spec.branching, where);
  spec.reward_density = field<double>(j, "reward_density", spec.reward_density, where);
  spec.slip = field<double>(j, "slip", spec.slip, where);
  spec.seed = field<std::uint64_t>(j, "seed", 0, where);
  if (j.contains("init")) {
    try {
      spec.init = init_from_json(j.at("init"));
    } catch (const json::exception& e) {
      throw ConfigError(where + ": field 'init': " + e.what());
    }
  }
  return spec;
}

json gen_spec_to_json(const GenSpec& spec) {
  return {{"family", family_name(spec.family)},
          {"S", spec.num_states},
          {"width", spec.width},
          {"height", spec.height},
          {"A", spec.num_actions},
          {"H", spec.horizon},
          {"branching", spec.branching},
          {"reward_density", spec.reward_density},
          {"slip", spec.slip},
          {"seed", spec.seed},
          {"init", init_to_json(spec.init)}};
}

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& p) {
  const std::filesystem::path path(p);
  return (path.is_absolute() || base.empty()) ? path : base / path;
}

json config_to_json_value(const ExperimentConfig& cfg) {
  json j;
  if (cfg.mdp_file) {
    j["mdp"] = {{"file", cfg.mdp_file->string()}};
  } else if (cfg.gen_spec) {
    j["mdp"] = {{"gen", gen_spec_to_json(*cfg.gen_spec)}};
  }
  if (cfg.init) j["init"] = init_to_json(*cfg.init);
  json v = {{"kind", to_string(cfg.variant.kind)},
            {"eps_p", cfg.variant.eps_p},
            {"eps_v", cfg.variant.eps_v},
            {"eps_a", cfg.variant.eps_a},
            {"model_seed", cfg.variant.model_seed},
            {"noise_seed", cfg.variant.noise_seed}};
  if (cfg.variant.model_file) v["model_file"] = cfg.variant.model_file->string();
  j["variant"] = v;
  j["h"] = cfg.h;
  j["K"] = cfg.episodes;
  j["seeds"] = cfg.seeds;
  j["delta"] = cfg.delta;
  if (!cfg.eps_grid.empty()) j["eps_grid"] = cfg.eps_grid;
  if (!cfg.snapshot_episodes.empty()) j["snapshot_episodes"] = cfg.snapshot_episodes;
  j["value_init"] = {{"kind", cfg.value_init.kind == ValueInit::Kind::kVstarPlus ? "vstar_plus" : "optimistic"},
                     {"slack", cfg.value_init.slack}};
  j["monitor"] = cfg.monitor;
  j["jobs"] = cfg.jobs;
  return j;
}

double median(std::vector<double> v) {
  if (v.empty()) return 0.0;
  std::sort(v.begin(), v.end());
  const std::size_t mid = v.size() / 2;
  return v.size() % 2 ? v[mid] : 0.5 * (v[mid - 1] + v[mid]);
}

}  // namespace

void ExperimentConfig::validate() const {
  if (static_cast<bool>(mdp_file) == static_cast<bool>(gen_spec)) {
    throw ConfigError("config: field 'mdp' needs exactly one of 'file' or 'gen'");
  }
  if (h == 0) throw ConfigError("config: field 'h' must be positive");
  if (episodes == 0) throw ConfigError("config: field 'K' must be at least 1");
  if (seeds.empty()) throw ConfigError("config: field 'seeds' must be nonempty");
  if (!(delta > 0.0 && delta < 1.0)) throw ConfigError("config: field 'delta' must lie in (0, 1)");
  for (double e : eps_grid) {
    if (!(e > 0.0)) throw ConfigError("config: field 'eps_grid' entries must be positive");
  }
  if (jobs == 0) throw ConfigError("config: field 'jobs' must be positive");
  if (variant.eps_p < 0.0 || variant.eps_v < 0.0 || variant.eps_a < 0.0) {
    throw ConfigError("config: variant error bounds must be nonnegative");
  }
  if (variant.kind == VariantKind::kApproxModel && !variant.model_file && variant.eps_p > 2.0) {
    throw ConfigError("config: field 'variant.eps_p' must lie in [0, 2]");
  }
}

ExperimentConfig parse_config(const std::string& json_text, const std::filesystem::path& base_dir) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config: malformed JSON: ") + e.what());
  }
  const std::string where = "config";
  if (!j.is_object()) throw ConfigError("config: document must be a JSON object");

  ExperimentConfig cfg;
  if (!j.contains("mdp") || !j.at("mdp").is_object()) throw ConfigError("config: field 'mdp' is required");
  const json& src = j.at("mdp");
  if (src.contains("file")) cfg.mdp_file = resolve(base_dir, field<std::string>(src, "file", "", "config.mdp"));
  if (src.contains("gen")) cfg.gen_spec = gen_spec_from_json(src.at("gen"));
  if (j.contains("init")) {
    try {
      cfg.init = init_from_json(j.at("init"));
    } catch (const json::exception& e) {
      throw ConfigError(std::string("config: field 'init': ") + e.what());
    }
  }

  if (j.contains("variant")) {
    const json& v = j.at("variant");
    const std::string vw = "config.variant";
    cfg.variant.kind = variant_kind_from_string(field<std::string>(v, "kind", "exact", vw));
    cfg.variant.eps_p = field<double>(v, "eps_p", 0.0, vw);
    cfg.variant.eps_v = field<double>(v, "eps_v", 0.0, vw);
    cfg.variant.eps_a = field<double>(v, "eps_a", 0.0, vw);
    cfg.variant.model_seed = field<std::uint64_t>(v, "model_seed", 0, vw);
    cfg.variant.noise_seed = field<std::uint64_t>(v, "noise_seed", 0, vw);
    if (v.contains("model_file")) cfg.variant.model_file = resolve(base_dir, field<std::string>(v, "model_file", "", vw));
  }
  cfg.h = field<std::size_t>(j, "h", 1, where);
  cfg.episodes = field<std::size_t>(j, "K", 1, where);
  cfg.seeds = field<std::vector<std::uint64_t>>(j, "seeds", {0}, where);
  cfg.delta = field<double>(j, "delta", 0.1, where);
  cfg.eps_grid = field<std::vector<double>>(j, "eps_grid", {}, where);
  cfg.snapshot_episodes = field<std::vector<std::size_t>>(j, "snapshot_episodes", {}, where);
  if (j.contains("value_init")) {
    const json& vi = j.at("value_init");
    const std::string kind = field<std::string>(vi, "kind", "optimistic", "config.value_init");
    if (kind == "vstar_plus") {
      cfg.value_init.kind = ValueInit::Kind::kVstarPlus;
    } else if (kind != "optimistic") {
      throw ConfigError("config.value_init: field 'kind' must be optimistic or vstar_plus");
    }
    cfg.value_init.slack = field<double>(vi, "slack", 0.0, "config.value_init");
    if (cfg.value_init.slack < 0.0) throw ConfigError("config.value_init: field 'slack' must be nonnegative");
  }
  cfg.monitor = field<bool>(j, "monitor", true, where);
  cfg.jobs = field<std::size_t>(j, "jobs", 1, where);
  cfg.validate();
  return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  try {
    return parse_config(read_text_file(path), path.parent_path());
  } catch (const ConfigError& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

std::string config_to_json(const ExperimentConfig& cfg) { return config_to_json_value(cfg).dump(2); }

GenSpec parse_gen_spec(const std::string& json_text) {
  try {
    return gen_spec_from_json(json::parse(json_text));
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("gen spec: malformed JSON: ") + e.what());
  }
}

Mdp load_environment(const ExperimentConfig& cfg) {
  cfg.validate();
  Mdp env = cfg.mdp_file ? load_mdp(*cfg.mdp_file) : gen(*cfg.gen_spec);
  if (cfg.init) env = env.with_init(*cfg.init);
  require_valid(env);
  return env;
}

VariantSpec build_variant(const ExperimentConfig& cfg, const Mdp& env, std::uint64_t seed) {
  const VariantConfig& vc = cfg.variant;
  switch (vc.kind) {
    case VariantKind::kExact:
      return VariantSpec::exact();
    case VariantKind::kApproxModel: {
      Mdp model = vc.model_file ? load_mdp(*vc.model_file) : perturb_model(env, vc.eps_p, vc.model_seed);
      VariantSpec v = VariantSpec::approx_model_of(model, vc.eps_p);
      if (vc.model_file) {
        // A supplied model must honor the stated l1 bound.
        for (State s = 0; s < env.num_states(); ++s) {
          for (Action a = 0; a < env.num_actions(); ++a) {
            if (s < model.num_states() && a < model.num_actions() &&
                l1_distance(env.row(s, a), model.row(s, a)) > vc.eps_p + 1e-12) {
              throw ConfigError("config.variant: model_file exceeds eps_p at (" + std::to_string(s) + ", " +
                                std::to_string(a) + ")");
            }
          }
        }
      }
      v.validate(env, cfg.h);
      return v;
    }
    case VariantKind::kApproxValue:
      return VariantSpec::approx_value(make_value_noise(vc.eps_v, mix64(vc.noise_seed ^ mix64(seed))));
    case VariantKind::kApproxAbstraction:
      return VariantSpec::approx_abstraction(build_abstraction(env, cfg.h, vc.eps_a), vc.eps_a);
  }
  return VariantSpec::exact();
}

ValueTable initial_table(const ExperimentConfig& cfg, const Mdp& env, const VariantSpec& variant) {
  ValueTable table(table_width(env, variant), env.horizon(), cfg.h);
  if (cfg.value_init.kind == ValueInit::Kind::kOptimistic) return table;

  const FullValueFunction ref = optimal_values(variant.planning_model(env));
  for (std::size_t n = 0; n < table.num_checkpoints(); ++n) {
    const std::size_t t = table.checkpoint_time(n);
    const double cap = static_cast<double>(env.horizon() - n * cfg.h);
    if (variant.kind == VariantKind::kApproxAbstraction) {
      std::vector<double> best(table.width(), -1.0);
      for (State s = 0; s < env.num_states(); ++s) {
        const std::size_t c = (*variant.abstraction)(n, s);
        best[c] = std::max(best[c], ref(t, s));
      }
      for (std::size_t c = 0; c < table.width(); ++c) {
        if (best[c] >= 0.0) table.set(n, c, std::min(cap, best[c] + cfg.value_init.slack));
      }
    } else {
      for (State s = 0; s < env.num_states(); ++s) table.set(n, s, std::min(cap, ref(t, s) + cfg.value_init.slack));
    }
  }
  return table;
}

double episode_regret(const Mdp& m, const FullValueFunction& vstar, const ValueTable& snapshot,
                      const VariantSpec& variant, State s1) {
  const NonstationaryPolicy pi = materialize_policy(variant.planning_model(m), snapshot, variant);
  return vstar(1, s1) - evaluate_policy(m, pi)(1, s1);
}

std::vector<PacCount> uniform_pac_counts(std::span<const double> regrets, double gap,
                                         std::span<const double> eps_grid) {
  std::vector<PacCount> out;
  out.reserve(eps_grid.size());
  for (double eps : eps_grid) {
    const auto count = static_cast<std::size_t>(
        std::count_if(regrets.begin(), regrets.end(), [&](double r) { return r >= gap + eps; }));
    out.push_back({eps, count});
  }
  return out;
}

std::vector<double> default_eps_grid(std::size_t H) {
  std::vector<double> grid;
  for (int i = 0; i <= 10; ++i) grid.push_back(std::ldexp(static_cast<double>(H), -i));
  return grid;
}

double regret_bound(std::size_t width, std::size_t H, std::size_t h, double delta, VariantKind kind,
                    std::size_t episodes, double eps) {
  if (h == 0 || H % h != 0) throw ConfigError("regret_bound: h must divide H");
  if (!(delta > 0.0 && delta < 1.0)) throw ConfigError("regret_bound: delta must lie in (0, 1)");
  const double Hd = static_cast<double>(H);
  const double hd = static_cast<double>(h);
  const double K = static_cast<double>(episodes);
  const double base = 9.0 * static_cast<double>(width) * Hd * (Hd - hd) / hd * std::log(3.0 / delta);
  switch (kind) {
    case VariantKind::kExact:
      return base;
    case VariantKind::kApproxModel:
      return base + Hd * (Hd - 1.0) * eps * K;
    case VariantKind::kApproxValue:
      return base * (1.0 + Hd * eps / hd) + 2.0 * Hd * eps * K / hd;
    case VariantKind::kApproxAbstraction:
      return base + Hd * eps * K / hd;
  }
  return base;
}

DbpReport dbp_telescope_check(std::span<const double> x, double c1, double c2, double tol) {
  DbpReport report;
  if (x.empty()) return report;
  for (std::size_t k = 0; k < x.size(); ++k) {
    if (k > 0 && x[k] > x[k - 1] + tol) {
      report.monotone = false;
      report.issues.push_back("X increases at k = " + std::to_string(k));
    }
    if (x[k] < c2 - tol || x[k] > c1 + tol) {
      report.bounded = false;
      report.issues.push_back("X leaves [C2, C1] at k = " + std::to_string(k));
    }
    if (k > 0) report.total_decrease += x[k - 1] - x[k];
  }
  const double scale = 1.0 + std::abs(x.front());
  report.residual = std::abs(report.total_decrease - (x.front() - x.back()));
  if (report.residual > tol * scale || report.total_decrease > c1 - c2 + tol * scale) {
    report.telescopes = false;
    report.issues.push_back("decreases do not telescope within C1 - C2");
  }
  return report;
}

namespace {

SeedResult run_seed(const ExperimentConfig& cfg, const Mdp& env, std::uint64_t seed) {
  const VariantSpec variant = build_variant(cfg, env, seed);
  RunOptions options;
  options.episodes = cfg.episodes;
  options.seed = seed;
  options.snapshot_episodes = cfg.snapshot_episodes;
  options.monitor = cfg.monitor;
  options.initial_table = initial_table(cfg, env, variant);

  SeedResult r;
  r.log = run_h_rtdp(env, variant, cfg.h, options);
  const std::vector<double> regrets = r.log.regrets();
  const double eps = cfg.variant.kind == VariantKind::kApproxModel   ? cfg.variant.eps_p
                     : cfg.variant.kind == VariantKind::kApproxValue ? cfg.variant.eps_v
                                                                     : cfg.variant.eps_a;
  r.total_regret = r.log.total_regret();
  r.bound = regret_bound(table_width(env, variant), env.horizon(), cfg.h, cfg.delta, cfg.variant.kind,
                         cfg.episodes, eps);
  r.bound_ok = r.total_regret <= r.bound;

  const double gap = variant.asymptotic_gap(env.horizon(), cfg.h);
  const double slack = cfg.variant.kind == VariantKind::kExact ? kRegretTolerance : kApproxTolerance;
  r.burn_in = cfg.episodes / 2;
  for (std::size_t k = r.burn_in; k < regrets.size(); ++k) r.tail_max_regret = std::max(r.tail_max_regret, regrets[k]);
  r.asymptotic_ok = r.tail_max_regret <= gap + slack;
  for (std::size_t k = 0; k < regrets.size(); ++k) {
    if (regrets[k] <= kRegretTolerance) {
      r.first_zero_regret_episode = k + 1;
      break;
    }
  }

  const std::vector<double> grid = cfg.eps_grid.empty() ? default_eps_grid(env.horizon()) : cfg.eps_grid;
  r.pac = uniform_pac_counts(regrets, gap, grid);

  std::vector<double> x{r.log.initial_value_sum};
  double backups = 0.0;
  for (const EpisodeRecord& e : r.log.episodes) {
    x.push_back(e.value_sum);
    backups += static_cast<double>(e.backups);
  }
  r.dbp = dbp_telescope_check(x, r.log.initial_value_sum, r.log.value_sum_floor);
  r.mean_backups = backups / static_cast<double>(cfg.episodes);
  return r;
}

}  // namespace

ResultsBundle run_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  const Mdp env = load_environment(cfg);
  if (env.horizon() % cfg.h != 0) {
    throw ConfigError("config: field 'h' must divide the horizon H = " + std::to_string(env.horizon()));
  }

  ResultsBundle bundle;
  bundle.config = cfg;
  bundle.baseline = h_dp(env, cfg.h, build_variant(cfg, env, cfg.seeds.front()));
  bundle.num_states = env.num_states();
  bundle.num_actions = env.num_actions();
  bundle.horizon = env.horizon();
  bundle.max_branching = env.max_branching();

  const VariantSpec probe = build_variant(cfg, env, cfg.seeds.front());
  bundle.table_width = table_width(env, probe);
  bundle.asymptotic_gap = probe.asymptotic_gap(env.horizon(), cfg.h);

  // Seeds fan out over workers; each result lands in its seed's slot.
  bundle.runs.resize(cfg.seeds.size());
  std::vector<std::exception_ptr> errors(cfg.seeds.size());
  std::atomic<std::size_t> next{0};
  const auto worker = [&] {
    for (std::size_t i = next++; i < cfg.seeds.size(); i = next++) {
      try {
        bundle.runs[i] = run_seed(cfg, env, cfg.seeds[i]);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const std::size_t workers = std::min(cfg.jobs, cfg.seeds.size());
  std::vector<std::thread> pool;
  for (std::size_t w = 1; w < workers; ++w) pool.emplace_back(worker);
  worker();
  for (std::thread& t : pool) t.join();
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }

  std::size_t passing = 0;
  bundle.mean_cum_regret.assign(cfg.episodes, 0.0);
  bundle.median_cum_regret.assign(cfg.episodes, 0.0);
  std::vector<std::vector<double>> cum(cfg.episodes);
  for (const SeedResult& r : bundle.runs) {
    passing += r.bound_ok ? 1 : 0;
    bundle.monitors_ok = bundle.monitors_ok && r.log.violations.empty() && r.dbp.ok();
    double running = 0.0;
    for (std::size_t k = 0; k < cfg.episodes; ++k) {
      running += r.log.episodes[k].regret;
      cum[k].push_back(running);
    }
  }
  for (std::size_t k = 0; k < cfg.episodes; ++k) {
    double total = 0.0;
    for (double c : cum[k]) total += c;
    bundle.mean_cum_regret[k] = total / static_cast<double>(cum[k].size());
    bundle.median_cum_regret[k] = median(cum[k]);
  }
  bundle.bound_pass_fraction = static_cast<double>(passing) / static_cast<double>(bundle.runs.size());
  return bundle;
}

std::string episodes_csv(const ResultsBundle& bundle) {
  std::ostringstream out;
  out << "seed,episode,start_state,episode_regret,cum_regret,value_sum_X,backups,updates\n";
  for (const SeedResult& r : bundle.runs) {
    double cum = 0.0;
    for (const EpisodeRecord& e : r.log.episodes) {
      cum += e.regret;
      out << r.log.seed << ',' << e.episode << ',' << e.start << ',' << format_double(e.regret) << ','
          << format_double(cum) << ',' << format_double(e.value_sum) << ',' << e.backups << ',' << e.updates
          << '\n';
    }
  }
  return out.str();
}

std::vector<EpisodeRow> parse_episodes_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) ||
      line != "seed,episode,start_state,episode_regret,cum_regret,value_sum_X,backups,updates") {
    throw ConfigError("episodes.csv: missing or unexpected header");
  }
  std::vector<EpisodeRow> rows;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (cells.size() != 8) throw ConfigError("episodes.csv: line " + std::to_string(line_no) + " needs 8 columns");
    const auto parse = [&](const std::string& c, auto& value) {
      const auto res = std::from_chars(c.data(), c.data() + c.size(), value);
      if (res.ec != std::errc() || res.ptr != c.data() + c.size()) {
        throw ConfigError("episodes.csv: bad value '" + c + "' on line " + std::to_string(line_no));
      }
    };
    EpisodeRow row;
    parse(cells[0], row.seed);
    parse(cells[1], row.episode);
    parse(cells[2], row.start_state);
    parse(cells[3], row.episode_regret);
    parse(cells[4], row.cum_regret);
    parse(cells[5], row.value_sum_x);
    parse(cells[6], row.backups);
    parse(cells[7], row.updates);
    rows.push_back(row);
  }
  return rows;
}

std::string summary_json(const ResultsBundle& bundle) {
  const ExperimentConfig& cfg = bundle.config;
  json seeds = json::array();
  bool asymptotic_ok = true;
  bool dbp_ok = true;
  double rtdp_backups = 0.0;
  for (const SeedResult& r : bundle.runs) {
    json pac = json::array();
    for (const PacCount& p : r.pac) pac.push_back({{"eps", p.eps}, {"count", p.count}});
    seeds.push_back({{"seed", r.log.seed},
                     {"total_regret", r.total_regret},
                     {"regret_bound", r.bound},
                     {"bound_ok", r.bound_ok},
                     {"asymptotic",
                      {{"gap", bundle.asymptotic_gap},
                       {"burn_in", r.burn_in},
                       {"tail_max_regret", r.tail_max_regret},
                       {"ok", r.asymptotic_ok}}},
                     {"first_zero_regret_episode", r.first_zero_regret_episode},
                     {"pac", pac},
                     {"dbp",
                      {{"ok", r.dbp.ok()},
                       {"monotone", r.dbp.monotone},
                       {"bounded", r.dbp.bounded},
                       {"telescopes", r.dbp.telescopes},
                       {"C1", r.log.initial_value_sum},
                       {"C2", r.log.value_sum_floor},
                       {"total_decrease", r.dbp.total_decrease},
                       {"residual", r.dbp.residual},
                       {"issues", r.dbp.issues}}},
                     {"violations", r.log.violations},
                     {"mean_backups_per_episode", r.mean_backups}});
    asymptotic_ok = asymptotic_ok && r.asymptotic_ok;
    dbp_ok = dbp_ok && r.dbp.ok();
    rtdp_backups += r.mean_backups;
  }
  rtdp_backups /= static_cast<double>(std::max<std::size_t>(1, bundle.runs.size()));

  const double eps = cfg.variant.kind == VariantKind::kApproxModel   ? cfg.variant.eps_p
                     : cfg.variant.kind == VariantKind::kApproxValue ? cfg.variant.eps_v
                                                                     : cfg.variant.eps_a;
  json comparison = {
      {"setting", to_string(cfg.variant.kind)},
      {"rtdp_regret_bound", regret_bound(bundle.table_width, bundle.horizon, cfg.h, cfg.delta, cfg.variant.kind,
                                         cfg.episodes, eps)},
      {"rtdp_asymptotic_gap", bundle.asymptotic_gap},
      {"rtdp_asymptotic_ok", asymptotic_ok},
      {"adp_gap", bundle.baseline->gap},
      {"adp_gap_bound", bundle.baseline->bound},
      {"adp_ok", bundle.baseline->gap <= bundle.baseline->bound + kRegretTolerance},
      {"adp_backups", bundle.baseline->backups},
      {"rtdp_mean_backups_per_episode", rtdp_backups}};

  json summary = {
      {"mdp",
       {{"S", bundle.num_states},
        {"A", bundle.num_actions},
        {"H", bundle.horizon},
        {"max_branching", bundle.max_branching},
        {"deterministic", bundle.max_branching == 1}}},
      {"variant", to_string(cfg.variant.kind)},
      {"h", cfg.h},
      {"K", cfg.episodes},
      {"delta", cfg.delta},
      {"table_width", bundle.table_width},
      {"table_entries", bundle.table_width * (bundle.horizon / cfg.h + 1)},
      {"seeds", seeds},
      {"verdicts",
       {{"regret_bound_pass_fraction", bundle.bound_pass_fraction},
        {"regret_bound_ok", bundle.bound_pass_fraction >= 0.95},
        {"asymptotic_ok", asymptotic_ok},
        {"dbp_ok", dbp_ok},
        {"monitors_ok", bundle.monitors_ok}}},
      {"rtdp_vs_adp", comparison},
      {"aggregate", {{"mean_cum_regret", bundle.mean_cum_regret}, {"median_cum_regret", bundle.median_cum_regret}}}};
  return summary.dump(2);
}

void write_results(const ResultsBundle& bundle, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  const Mdp env = load_environment(bundle.config);
  save_mdp(env, dir / "mdp.json");

  // The stored config points at the stored instance.
  ExperimentConfig stored = bundle.config;
  stored.mdp_file = "mdp.json";
  stored.gen_spec.reset();
  stored.init.reset();
  if (stored.variant.model_file) stored.variant.model_file = std::filesystem::absolute(*stored.variant.model_file);
  write_text_file(dir / "config.json", config_to_json(stored) + "\n");
  write_text_file(dir / "episodes.csv", episodes_csv(bundle));
  write_text_file(dir / "summary.json", summary_json(bundle) + "\n");

  bool any_snapshot = false;
  json snaps = json::array();
  for (const SeedResult& r : bundle.runs) {
    for (const auto& [k, table] : r.log.snapshots) {
      any_snapshot = true;
      json checkpoints = json::array();
      for (std::size_t n = 0; n < table.num_checkpoints(); ++n) {
        checkpoints.push_back(std::vector<double>(table.values(n).begin(), table.values(n).end()));
      }
      snaps.push_back({{"seed", r.log.seed}, {"episode", k}, {"h", table.lookahead()}, {"values", checkpoints}});
    }
  }
  if (any_snapshot) write_text_file(dir / "snapshots.json", snaps.dump(2) + "\n");
}

CheckReport check_results(const std::filesystem::path& dir) {
  CheckReport report;
  const auto fail = [&](const std::string& what) { report.failures.push_back(what); };
  const auto check = [&](bool ok, const std::string& what) {
    ++report.checks;
    if (!ok) fail(what);
  };

  const ExperimentConfig cfg = load_config(dir / "config.json");
  const std::string csv_text = read_text_file(dir / "episodes.csv");
  const std::vector<EpisodeRow> rows = parse_episodes_csv(csv_text);
  const json summary = json::parse(read_text_file(dir / "summary.json"));
  check(rows.size() == cfg.seeds.size() * cfg.episodes, "episodes.csv row count does not match seeds x K");

  for (const json& seed_entry : summary.at("seeds")) {
    const auto seed = seed_entry.at("seed").get<std::uint64_t>();
    std::vector<double> regrets;
    double running = 0.0;
    double prev_cum = -INFINITY;
    double prev_x = INFINITY;
    std::size_t expected_episode = 1;
    for (const EpisodeRow& row : rows) {
      if (row.seed != seed) continue;
      const std::string at = "seed " + std::to_string(seed) + " episode " + std::to_string(row.episode);
      check(row.episode == expected_episode++, "episode numbering gap at " + at);
      check(row.episode_regret >= -kRegretTolerance, "negative regret at " + at);
      running += row.episode_regret;
      check(row.cum_regret == running, "cum_regret is not the running sum at " + at);
      check(row.cum_regret >= prev_cum - kRegretTolerance, "cumulative regret decreases at " + at);
      check(row.value_sum_x <= prev_x + kRegretTolerance, "value sum X increases at " + at);
      prev_cum = row.cum_regret;
      prev_x = row.value_sum_x;
      regrets.push_back(row.episode_regret);
    }
    check(std::abs(seed_entry.at("total_regret").get<double>() - running) <= kRegretTolerance,
          "summary total_regret disagrees with episodes.csv for seed " + std::to_string(seed));

    const double gap = seed_entry.at("asymptotic").at("gap").get<double>();
    for (const json& p : seed_entry.at("pac")) {
      const auto count = p.at("count").get<std::size_t>();
      const double eps = p.at("eps").get<double>();
      const std::vector<double> grid{eps};
      check(uniform_pac_counts(regrets, gap, grid).front().count == count,
            "PAC count mismatch for seed " + std::to_string(seed));
    }
    // Counts must not increase as eps grows.
    std::vector<std::pair<double, std::size_t>> pac;
    for (const json& p : seed_entry.at("pac")) pac.emplace_back(p.at("eps").get<double>(), p.at("count").get<std::size_t>());
    std::sort(pac.begin(), pac.end());
    for (std::size_t i = 1; i < pac.size(); ++i) {
      check(pac[i].second <= pac[i - 1].second, "PAC counts increase with eps for seed " + std::to_string(seed));
    }
    check(seed_entry.at("violations").empty(), "recorded invariant violations for seed " + std::to_string(seed));
    check(seed_entry.at("dbp").at("ok").get<bool>(), "value-sum process check failed for seed " + std::to_string(seed));
  }

  // Re-execute with monitors on and compare byte for byte.
  ExperimentConfig rerun = cfg;
  rerun.monitor = true;
  const ResultsBundle again = run_experiment(rerun);
  check(episodes_csv(again) == csv_text, "re-run does not reproduce episodes.csv");
  for (const SeedResult& r : again.runs) {
    for (const std::string& v : r.log.violations) fail("seed " + std::to_string(r.log.seed) + ": " + v);
    ++report.checks;
    if (!r.dbp.ok()) fail("seed " + std::to_string(r.log.seed) + ": value-sum process check failed on re-run");
  }
  return report;
}

std::vector<ResultsBundle> run_sweep(const ExperimentConfig& cfg, std::span<const std::size_t> hs,
                                     const std::filesystem::path& dir) {
  if (hs.empty()) throw ConfigError("sweep: no lookahead values given");
  std::vector<ResultsBundle> out;
  std::ostringstream csv;
  csv << "h,seed,first_zero_regret_episode,total_regret\n";
  for (std::size_t h : hs) {
    ExperimentConfig c = cfg;
    c.h = h;
    ResultsBundle bundle = run_experiment(c);
    write_results(bundle, dir / ("h" + std::to_string(h)));
    for (const SeedResult& r : bundle.runs) {
      csv << h << ',' << r.log.seed << ',' << r.first_zero_regret_episode << ',' << format_double(r.total_regret)
          << '\n';
    }
    out.push_back(std::move(bundle));
  }
  write_text_file(dir / "sweep.csv", csv.str());
  return out;
}

}  // namespace hrtdp
