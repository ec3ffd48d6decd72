#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "hrtdp/adp.hpp"
#include "hrtdp/envgen.hpp"
#include "hrtdp/mdp.hpp"
#include "hrtdp/planner.hpp"
#include "hrtdp/variant.hpp"

namespace hrtdp {

// How the approximate variant's auxiliary object is produced for a run.
struct VariantConfig {
  VariantKind kind = VariantKind::kExact;
  double eps_p = 0.0;
  double eps_v = 0.0;
  double eps_a = 0.0;
  std::uint64_t model_seed = 0;  // perturb_model seed (AM)
  std::uint64_t noise_seed = 0;  // mixed with the run seed (AV)
  std::optional<std::filesystem::path> model_file;  // AM: load p_hat instead of perturbing
};

// Starting values. "vstar_plus" seeds each entry with min(H - nh, V* + slack)
// computed on the planning model.
struct ValueInit {
  enum class Kind { kOptimistic, kVstarPlus };
  Kind kind = Kind::kOptimistic;
  double slack = 0.0;
};

struct ExperimentConfig {
  std::optional<std::filesystem::path> mdp_file;
  std::optional<GenSpec> gen_spec;
  std::optional<InitSchedule> init;  // overrides the instance's schedule
  VariantConfig variant;
  std::size_t h = 1;
  std::size_t episodes = 1;
  std::vector<std::uint64_t> seeds{0};
  double delta = 0.1;
  std::vector<double> eps_grid;  // empty: {2^-i H : i = 0..10}
  std::vector<std::size_t> snapshot_episodes;
  ValueInit value_init;
  bool monitor = true;
  std::size_t jobs = 1;

  // Throws ConfigError naming the offending field.
  void validate() const;
};

ExperimentConfig parse_config(const std::string& json_text, const std::filesystem::path& base_dir = {});
ExperimentConfig load_config(const std::filesystem::path& path);
std::string config_to_json(const ExperimentConfig& cfg);
GenSpec parse_gen_spec(const std::string& json_text);

Mdp load_environment(const ExperimentConfig& cfg);
VariantSpec build_variant(const ExperimentConfig& cfg, const Mdp& env, std::uint64_t seed);
ValueTable initial_table(const ExperimentConfig& cfg, const Mdp& env, const VariantSpec& variant);

// V*_1(s1) - V^{pi}_1(s1) where pi is the lookahead policy induced by `snapshot`.
double episode_regret(const Mdp& m, const FullValueFunction& vstar, const ValueTable& snapshot,
                      const VariantSpec& variant, State s1);

struct PacCount {
  double eps = 0.0;
  std::size_t count = 0;

  friend bool operator==(const PacCount&, const PacCount&) = default;
};

// N_eps^Delta = #{k : regret_k >= Delta + eps} for each eps of the grid.
std::vector<PacCount> uniform_pac_counts(std::span<const double> regrets, double gap,
                                         std::span<const double> eps_grid);

std::vector<double> default_eps_grid(std::size_t H);

// High-probability cumulative regret bounds:
//   exact: 9 W H (H-h) / h ln(3/delta)
//   AM:    exact + H(H-1) eps_P K
//   AV:    exact * (1 + H eps_V / h) + 2 H eps_V K / h
//   AA:    exact with W = S_phi, + H eps_A K / h
// where W is the table width (S, or S_phi for AA).
double regret_bound(std::size_t width, std::size_t H, std::size_t h, double delta, VariantKind kind,
                    std::size_t episodes, double eps);

struct DbpReport {
  bool monotone = true;
  bool bounded = true;
  bool telescopes = true;
  double total_decrease = 0.0;
  double residual = 0.0;  // |sum of decreases - (X_0 - X_K)|
  std::vector<std::string> issues;

  bool ok() const { return monotone && bounded && telescopes; }
};

// Checks that X is nonincreasing, stays within [c2, c1], and that its
// decreases telescope to X_0 - X_K <= c1 - c2.
DbpReport dbp_telescope_check(std::span<const double> x, double c1, double c2, double tol = 1e-9);

struct SeedResult {
  RunLog log;
  double total_regret = 0.0;
  double bound = 0.0;
  bool bound_ok = false;
  std::size_t burn_in = 0;        // asymptotic checks use episodes after this one
  double tail_max_regret = 0.0;
  bool asymptotic_ok = false;
  std::size_t first_zero_regret_episode = 0;  // 0 when no episode reached zero regret
  std::vector<PacCount> pac;
  DbpReport dbp;
  double mean_backups = 0.0;
};

struct ResultsBundle {
  ExperimentConfig config;
  std::size_t num_states = 0;
  std::size_t num_actions = 0;
  std::size_t horizon = 0;
  std::size_t max_branching = 0;
  std::size_t table_width = 0;
  double asymptotic_gap = 0.0;
  std::vector<SeedResult> runs;  // ordered as config.seeds
  std::vector<double> mean_cum_regret;
  std::vector<double> median_cum_regret;
  double bound_pass_fraction = 0.0;
  std::optional<AdpResult> baseline;  // h-DP run on the same instance
  bool monitors_ok = true;
};

ResultsBundle run_experiment(const ExperimentConfig& cfg);

// episodes.csv, summary.json, config.json (self-contained with mdp.json).
void write_results(const ResultsBundle& bundle, const std::filesystem::path& dir);

struct EpisodeRow {
  std::uint64_t seed = 0;
  std::size_t episode = 0;
  State start_state = 0;
  double episode_regret = 0.0;
  double cum_regret = 0.0;
  double value_sum_x = 0.0;
  std::size_t backups = 0;
  std::size_t updates = 0;

  friend bool operator==(const EpisodeRow&, const EpisodeRow&) = default;
};

std::string episodes_csv(const ResultsBundle& bundle);
std::vector<EpisodeRow> parse_episodes_csv(const std::string& text);
std::string summary_json(const ResultsBundle& bundle);

// Re-runs the invariant monitors over a results directory; also re-executes
// the stored config and compares the regenerated episodes.csv byte for byte.
struct CheckReport {
  std::vector<std::string> failures;
  std::size_t checks = 0;
  bool ok() const { return failures.empty(); }
};

CheckReport check_results(const std::filesystem::path& dir);

// Runs the config once per lookahead in `hs` under dir/h<h>/ and writes dir/sweep.csv
// with columns h, seed, first_zero_regret_episode, total_regret.
std::vector<ResultsBundle> run_sweep(const ExperimentConfig& cfg, std::span<const std::size_t> hs,
                                     const std::filesystem::path& dir);

}  // namespace hrtdp
