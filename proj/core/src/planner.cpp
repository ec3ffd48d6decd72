#include "hrtdp/planner.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "hrtdp/errors.hpp"

namespace hrtdp {

std::size_t table_width(const Mdp& env, const VariantSpec& variant) {
  return variant.kind == VariantKind::kApproxAbstraction ? variant.abstraction->num_abstract()
                                                         : env.num_states();
}

Terminal checkpoint_terminal(const ValueTable& table, std::size_t n, const VariantSpec& variant) {
  if (n >= table.num_checkpoints()) throw ContractError("checkpoint index past H+1");
  if (variant.kind == VariantKind::kApproxAbstraction) {
    return Terminal::abstract(table.values(n), variant.abstraction->phi(n));
  }
  return Terminal::dense(table.values(n));
}

LookaheadResult act_lookahead(const Mdp& m_plan, const ValueTable& table, State s, std::size_t t,
                              const VariantSpec& variant) {
  if (t == 0 || t > table.horizon()) throw ContractError("act: time step outside [1, H]");
  const std::size_t n = table.next_checkpoint(t);
  const std::size_t depth = table.checkpoint_time(n) - t;
  return lookahead_action(m_plan, s, depth, checkpoint_terminal(table, n, variant));
}

Action act(const Mdp& m_plan, const ValueTable& table, State s, std::size_t t, const VariantSpec& variant) {
  return act_lookahead(m_plan, table, s, t, variant).action;
}

UpdateResult checkpoint_update_detail(const Mdp& m_plan, ValueTable& table, State s, std::size_t t,
                                      const VariantSpec& variant, std::size_t episode) {
  if (t == 0 || t > table.horizon() || !table.is_checkpoint_time(t)) {
    throw ContractError("checkpoint_update: t is not a checkpoint time in [1, H]");
  }
  const std::size_t n = (t - 1) / table.lookahead();
  UpdateResult out;
  out.lookahead = act_lookahead(m_plan, table, s, t, variant);
  const double backup = out.lookahead.root_value;

  switch (variant.kind) {
    case VariantKind::kExact:
    case VariantKind::kApproxModel:
      out.value = backup;
      table.set(n, s, out.value);
      break;
    case VariantKind::kApproxValue:
      out.value = std::min((*variant.value_noise)(s, episode) + backup, table.get(n, s));
      table.set(n, s, out.value);
      break;
    case VariantKind::kApproxAbstraction: {
      const std::size_t cell = (*variant.abstraction)(n, s);
      out.value = std::min(backup, table.get(n, cell));
      table.set(n, cell, out.value);
      break;
    }
  }
  return out;
}

double checkpoint_update(const Mdp& m_plan, ValueTable& table, State s, std::size_t t,
                         const VariantSpec& variant, std::size_t episode) {
  return checkpoint_update_detail(m_plan, table, s, t, variant, episode).value;
}

NonstationaryPolicy materialize_policy(const Mdp& m_plan, const ValueTable& table, const VariantSpec& variant) {
  const std::size_t S = m_plan.num_states();
  const std::size_t h = table.lookahead();
  NonstationaryPolicy pi(table.horizon(), S);
  std::vector<double> next(S);
  std::vector<double> current(S);
  const auto lookup = [&next](State x) { return next[x]; };
  for (std::size_t n = 0; n + 1 < table.num_checkpoints(); ++n) {
    for (State s = 0; s < S; ++s) {
      next[s] = variant.kind == VariantKind::kApproxAbstraction
                    ? table.get(n + 1, (*variant.abstraction)(n + 1, s))
                    : table.get(n + 1, s);
    }
    for (std::size_t t = (n + 1) * h; t >= n * h + 1; --t) {
      for (State s = 0; s < S; ++s) {
        const Backup b = greedy_backup(m_plan, s, lookup);
        pi.set(s, t, b.action);
        current[s] = b.value;
      }
      std::swap(current, next);
    }
  }
  return pi;
}

std::vector<double> RunLog::regrets() const {
  std::vector<double> out;
  out.reserve(episodes.size());
  for (const EpisodeRecord& e : episodes) out.push_back(e.regret);
  return out;
}

double RunLog::total_regret() const {
  double total = 0.0;
  for (const EpisodeRecord& e : episodes) total += e.regret;
  return total;
}

namespace {

// Reference values the monitors compare against.
struct MonitorContext {
  const Mdp& env;
  const VariantSpec& variant;
  FullValueFunction reference;  // V* of the planning model
  bool deterministic;
  double tolerance;
};

std::string at_entry(std::size_t k, std::size_t n, std::size_t i) {
  std::ostringstream os;
  os << "episode " << k << ", checkpoint " << n << ", entry " << i;
  return os.str();
}

// Optimism slack allowed at checkpoint n: eps (H/h - n) for AV and AA.
double optimism_slack(const VariantSpec& variant, const ValueTable& table, std::size_t n) {
  const double remaining = static_cast<double>(table.num_checkpoints() - 1 - n);
  if (variant.kind == VariantKind::kApproxValue) return variant.eps_v * remaining;
  if (variant.kind == VariantKind::kApproxAbstraction) return variant.eps_a * remaining;
  return 0.0;
}

void check_table(const MonitorContext& ctx, const ValueTable& before, const ValueTable& after,
                 std::size_t k, std::vector<std::string>& out) {
  const double tol = ctx.tolerance;
  for (std::size_t n = 0; n < after.num_checkpoints(); ++n) {
    for (std::size_t i = 0; i < after.width(); ++i) {
      if (after.get(n, i) > before.get(n, i) + tol) out.push_back("non-increase violated at " + at_entry(k, n, i));
      if (ctx.variant.kind == VariantKind::kApproxAbstraction && after.get(n, i) < -tol) {
        out.push_back("negative abstract value at " + at_entry(k, n, i));
      }
    }
    const double slack = optimism_slack(ctx.variant, after, n);
    const std::size_t time = after.checkpoint_time(n);
    for (State s = 0; s < ctx.env.num_states(); ++s) {
      const std::size_t i = ctx.variant.kind == VariantKind::kApproxAbstraction ? (*ctx.variant.abstraction)(n, s) : s;
      if (after.get(n, i) + slack < ctx.reference(time, s) - tol) {
        out.push_back("optimism violated at " + at_entry(k, n, i) + " (state " + std::to_string(s) + ")");
      }
    }
  }
}

double value_sum_floor(const Mdp& env, const VariantSpec& variant, const FullValueFunction& reference,
                       const ValueTable& table) {
  double floor = 0.0;
  for (std::size_t n = 1; n + 1 < table.num_checkpoints(); ++n) {
    const std::size_t time = table.checkpoint_time(n);
    const double slack = optimism_slack(variant, table, n);
    if (variant.kind == VariantKind::kApproxAbstraction) {
      std::vector<double> best(table.width(), 0.0);
      for (State s = 0; s < env.num_states(); ++s) {
        const std::size_t c = (*variant.abstraction)(n, s);
        best[c] = std::max(best[c], reference(time, s) - slack);
      }
      for (double b : best) floor += b;
    } else {
      for (State s = 0; s < env.num_states(); ++s) floor += reference(time, s) - slack;
    }
  }
  return floor;
}

// Shared per-episode bookkeeping of both runners.
class EpisodeMeter {
 public:
  EpisodeMeter(const Mdp& env, const VariantSpec& variant, const RunOptions& options)
      : env_(env), variant_(variant), options_(options), vstar_(optimal_values(env)),
        ctx_{env, variant, optimal_values(variant.planning_model(env)), env.max_branching() == 1,
             options.tolerance} {}

  const FullValueFunction& vstar() const { return vstar_; }

  void begin(RunLog& log, const ValueTable& table) {
    log.table_entries = table.num_entries();
    log.initial_value_sum = table.interior_sum();
    log.value_sum_floor = value_sum_floor(env_, variant_, ctx_.reference, table);
  }

  // Regret of the policy induced by the table at episode start.
  void measure_start(EpisodeRecord& rec, const ValueTable& table) {
    if (!policy_values_ || cached_version_ != table.version()) {
      const Mdp& plan = variant_.planning_model(env_);
      policy_values_ = evaluate_policy(env_, materialize_policy(plan, table, variant_));
      cached_version_ = table.version();
    }
    rec.policy_value = (*policy_values_)(1, rec.start);
    rec.regret = vstar_(1, rec.start) - rec.policy_value;
    rec.value_sum_before = table.interior_sum();
    if (options_.monitor) before_ = table;
  }

  void finish(RunLog& log, EpisodeRecord&& rec, const ValueTable& table) {
    rec.value_sum = table.interior_sum();
    if (options_.monitor) monitor(log, rec, table);
    for (std::size_t k : options_.snapshot_episodes) {
      if (k == rec.episode) log.snapshots.emplace_back(k, table);
    }
    log.episodes.push_back(std::move(rec));
  }

 private:
  void monitor(RunLog& log, const EpisodeRecord& rec, const ValueTable& table) {
    const double tol = options_.tolerance;
    const std::size_t k = rec.episode;
    check_table(ctx_, *before_, table, k, log.violations);
    if (rec.regret < -tol) log.violations.push_back("negative regret in episode " + std::to_string(k));
    if (variant_.kind == VariantKind::kExact) {
      if (rec.value_sum > rec.value_sum_before + tol) {
        log.violations.push_back("value sum increased in episode " + std::to_string(k));
      }
      if (ctx_.deterministic) {
        double decrease = 0.0;
        for (std::size_t n = 1; n + 1 < table.num_checkpoints(); ++n) {
          for (std::size_t i = 0; i < table.width(); ++i) decrease += before_->get(n, i) - table.get(n, i);
        }
        const double gap = rec.root_value - rec.policy_value;
        if (std::abs(gap - decrease) > tol) {
          std::ostringstream os;
          os << "optimality-gap identity violated in episode " << k << " (gap " << gap << ", decrease "
             << decrease << ")";
          log.violations.push_back(os.str());
        }
      }
    }
  }

  const Mdp& env_;
  const VariantSpec& variant_;
  const RunOptions& options_;
  FullValueFunction vstar_;
  MonitorContext ctx_;
  std::optional<FullValueFunction> policy_values_;
  std::uint64_t cached_version_ = 0;
  std::optional<ValueTable> before_;
};

ValueTable starting_table(const RunOptions& options, std::size_t width, std::size_t H, std::size_t h) {
  if (!options.initial_table) return ValueTable(width, H, h);
  const ValueTable& t = *options.initial_table;
  if (t.width() != width || t.horizon() != H || t.lookahead() != h) {
    throw ConfigError("initial table shape does not match the run");
  }
  return t;
}

}  // namespace

RunLog run_h_rtdp(const Mdp& env, const VariantSpec& variant, std::size_t h, const RunOptions& options) {
  require_valid(env);
  variant.validate(env, h);
  const Mdp& plan = variant.planning_model(env);
  if (&plan != &env) require_valid(plan);

  const std::size_t H = env.horizon();
  ValueTable table = starting_table(options, table_width(env, variant), H, h);
  EpisodeMeter meter(env, variant, options);

  RunLog log;
  log.seed = options.seed;
  log.lookahead = h;
  log.kind = variant.kind;
  meter.begin(log, table);

  Rng rng(options.seed);
  for (std::size_t k = 1; k <= options.episodes; ++k) {
    EpisodeRecord rec;
    rec.episode = k;
    rec.start = env.init().start_state(k, env.num_states());
    meter.measure_start(rec, table);

    State s = rec.start;
    rec.states.push_back(s);
    for (std::size_t t = 1; t <= H; ++t) {
      // The update at a checkpoint and the action there come from the same
      // h-step lookahead against the next checkpoint.
      LookaheadResult la;
      if (table.is_checkpoint_time(t)) {
        const UpdateResult upd = checkpoint_update_detail(plan, table, s, t, variant, k);
        la = upd.lookahead;
        ++rec.updates;
        if (t == 1) rec.root_value = upd.value;
      } else {
        la = act_lookahead(plan, table, s, t, variant);
      }
      rec.backups += la.backups_performed;
      rec.actions.push_back(la.action);
      s = sample_transition(env, s, la.action, rng);
      rec.states.push_back(s);
    }
    meter.finish(log, std::move(rec), table);
  }
  return log;
}

RunLog run_rtdp(const Mdp& env, const RunOptions& options) {
  require_valid(env);
  const std::size_t S = env.num_states();
  const std::size_t A = env.num_actions();
  const std::size_t H = env.horizon();
  const VariantSpec variant = VariantSpec::exact();

  // values[t-1][s] holds V_t(s) for t in [1, H+1], initialized to H - t + 1.
  std::vector<std::vector<double>> values(H + 1);
  for (std::size_t t = 1; t <= H + 1; ++t) values[t - 1].assign(S, static_cast<double>(H + 1 - t));

  ValueTable table = starting_table(options, S, H, 1);
  for (std::size_t t = 1; t <= H + 1; ++t) {
    for (State s = 0; s < S; ++s) values[t - 1][s] = table.get(t - 1, s);
  }
  const auto sync = [&](std::size_t t, State s) { table.set(t - 1, s, values[t - 1][s]); };

  EpisodeMeter meter(env, variant, options);
  RunLog log;
  log.seed = options.seed;
  log.lookahead = 1;
  log.kind = VariantKind::kExact;
  meter.begin(log, table);

  const auto q = [&](State s, Action a, const std::vector<double>& next) {
    double acc = 0.0;
    for (const Transition& tr : env.row(s, a)) acc += tr.prob * next[tr.next];
    return env.reward(s, a) + acc;
  };

  Rng rng(options.seed);
  for (std::size_t k = 1; k <= options.episodes; ++k) {
    EpisodeRecord rec;
    rec.episode = k;
    rec.start = env.init().start_state(k, S);
    meter.measure_start(rec, table);

    State s = rec.start;
    rec.states.push_back(s);
    for (std::size_t t = 1; t <= H; ++t) {
      const std::vector<double>& next = values[t];

      double update = q(s, 0, next);
      for (Action a = 1; a < A; ++a) update = std::max(update, q(s, a, next));
      values[t - 1][s] = update;
      sync(t, s);
      ++rec.updates;
      ++rec.backups;
      if (t == 1) rec.root_value = update;

      Action greedy = 0;
      double best = q(s, 0, next);
      for (Action a = 1; a < A; ++a) {
        const double v = q(s, a, next);
        if (v > best) {
          best = v;
          greedy = a;
        }
      }
      rec.actions.push_back(greedy);
      s = sample_transition(env, s, greedy, rng);
      rec.states.push_back(s);
    }
    meter.finish(log, std::move(rec), table);
  }
  return log;
}

}  // namespace hrtdp
