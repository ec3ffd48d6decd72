#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "hrtdp/envgen.hpp"
#include "hrtdp/harness.hpp"
#include "hrtdp/mdp_io.hpp"

namespace {

// Exit codes: 0 ok, 1 invariant monitor failure, 2 usage/config/IO error.
constexpr int kMonitorFailure = 1;
constexpr int kError = 2;

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error(path.string() + ": cannot open");
  std::ostringstream text;
  text << in.rdbuf();
  return text.str();
}

void print_bundle(const hrtdp::ResultsBundle& b) {
  std::printf("h=%zu K=%zu seeds=%zu variant=%s S=%zu A=%zu H=%zu\n", b.config.h, b.config.episodes, b.runs.size(),
              hrtdp::to_string(b.config.variant.kind).c_str(), b.num_states, b.num_actions, b.horizon);
  double worst = 0.0;
  for (const auto& r : b.runs) worst = r.total_regret > worst ? r.total_regret : worst;
  std::printf("  mean regret %.6g  max regret %.6g  bound pass %.3f  monitors %s\n",
              b.mean_cum_regret.empty() ? 0.0 : b.mean_cum_regret.back(), worst, b.bound_pass_fraction,
              b.monitors_ok ? "ok" : "FAILED");
  for (const auto& r : b.runs) {
    for (const auto& v : r.log.violations) std::fprintf(stderr, "seed %llu: %s\n", static_cast<unsigned long long>(r.log.seed), v.c_str());
    for (const auto& v : r.dbp.issues) std::fprintf(stderr, "seed %llu: %s\n", static_cast<unsigned long long>(r.log.seed), v.c_str());
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"h-RTDP planning and experiment harness"};
  app.require_subcommand(1);

  std::string spec_file, out_file, config_file, out_dir, results_dir;
  std::vector<std::size_t> hs;
  std::size_t jobs = 0;

  auto* gen_cmd = app.add_subcommand("gen", "Generate an MDP instance from a JSON spec");
  gen_cmd->add_option("--spec", spec_file, "Generator spec (JSON)")->required()->check(CLI::ExistingFile);
  gen_cmd->add_option("--out", out_file, "Output MDP file")->required();

  auto* run_cmd = app.add_subcommand("run", "Run an experiment config");
  run_cmd->add_option("--config", config_file, "Experiment config (JSON)")->required()->check(CLI::ExistingFile);
  run_cmd->add_option("--out-dir", out_dir, "Results directory")->required();
  run_cmd->add_option("--jobs", jobs, "Worker threads (overrides config)");

  auto* sweep_cmd = app.add_subcommand("sweep", "Run an experiment config for several lookahead depths");
  sweep_cmd->add_option("--config", config_file, "Experiment config (JSON)")->required()->check(CLI::ExistingFile);
  sweep_cmd->add_option("--hs", hs, "Lookahead depths, comma separated")->required()->delimiter(',');
  sweep_cmd->add_option("--out-dir", out_dir, "Results directory")->required();
  sweep_cmd->add_option("--jobs", jobs, "Worker threads (overrides config)");

  auto* check_cmd = app.add_subcommand("check", "Re-run invariant monitors over a results directory");
  check_cmd->add_option("--results", results_dir, "Results directory")->required()->check(CLI::ExistingDirectory);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*gen_cmd) {
      const hrtdp::Mdp m = hrtdp::gen(hrtdp::parse_gen_spec(read_file(spec_file)));
      hrtdp::save_mdp(m, out_file);
      std::printf("wrote %s (S=%zu A=%zu H=%zu)\n", out_file.c_str(), m.num_states(), m.num_actions(), m.horizon());
      return 0;
    }
    if (*run_cmd) {
      hrtdp::ExperimentConfig cfg = hrtdp::load_config(config_file);
      if (jobs > 0) cfg.jobs = jobs;
      const hrtdp::ResultsBundle bundle = hrtdp::run_experiment(cfg);
      hrtdp::write_results(bundle, out_dir);
      print_bundle(bundle);
      return bundle.monitors_ok ? 0 : kMonitorFailure;
    }
    if (*sweep_cmd) {
      hrtdp::ExperimentConfig cfg = hrtdp::load_config(config_file);
      if (jobs > 0) cfg.jobs = jobs;
      bool ok = true;
      for (const auto& bundle : hrtdp::run_sweep(cfg, hs, out_dir)) {
        print_bundle(bundle);
        ok = ok && bundle.monitors_ok;
      }
      return ok ? 0 : kMonitorFailure;
    }
    if (*check_cmd) {
      const hrtdp::CheckReport report = hrtdp::check_results(results_dir);
      for (const auto& f : report.failures) std::fprintf(stderr, "FAIL %s\n", f.c_str());
      std::printf("%zu checks, %zu failures\n", report.checks, report.failures.size());
      return report.ok() ? 0 : kMonitorFailure;
    }
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kError;
  }
  return 0;
}
