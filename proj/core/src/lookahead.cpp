#include "hrtdp/lookahead.hpp"

#include <algorithm>
#include <string>
#include <unordered_set>

#include "hrtdp/errors.hpp"

namespace hrtdp {

Terminal Terminal::constant(double c) {
  Terminal t;
  t.kind_ = Kind::kConstant;
  t.constant_ = c;
  return t;
}

Terminal Terminal::dense(std::span<const double> values) {
  Terminal t;
  t.kind_ = Kind::kDense;
  t.values_ = values;
  return t;
}

Terminal Terminal::abstract(std::span<const double> abstract_values, std::span<const std::size_t> phi) {
  Terminal t;
  t.kind_ = Kind::kAbstract;
  t.values_ = abstract_values;
  t.phi_ = phi;
  return t;
}

Terminal Terminal::sparse(std::unordered_map<State, double> values) {
  Terminal t;
  t.kind_ = Kind::kSparse;
  t.sparse_ = std::move(values);
  return t;
}

Terminal Terminal::function(std::function<std::optional<double>(State)> fn) {
  Terminal t;
  t.kind_ = Kind::kFunction;
  t.fn_ = std::move(fn);
  return t;
}

std::optional<double> Terminal::operator()(State s) const {
  switch (kind_) {
    case Kind::kConstant:
      return constant_;
    case Kind::kDense:
      if (s < values_.size()) return values_[s];
      return std::nullopt;
    case Kind::kAbstract:
      if (s < phi_.size() && phi_[s] < values_.size()) return values_[phi_[s]];
      return std::nullopt;
    case Kind::kSparse: {
      const auto it = sparse_.find(s);
      if (it == sparse_.end()) return std::nullopt;
      return it->second;
    }
    case Kind::kFunction:
      return fn_ ? fn_(s) : std::nullopt;
  }
  return std::nullopt;
}

ReachSets forward_pass(const Mdp& m, State s, std::size_t h) {
  if (s >= m.num_states()) throw std::out_of_range("forward_pass: state out of range");
  if (h == 0) throw ContractError("forward_pass: depth must be at least 1");

  ReachSets rs;
  rs.origin = s;
  rs.depth = h;
  rs.layers.reserve(h + 1);
  rs.layers.push_back({s});
  std::unordered_set<State> next;
  for (std::size_t t = 2; t <= h + 1; ++t) {
    next.clear();
    for (State x : rs.layers.back()) {
      for (Action a = 0; a < m.num_actions(); ++a) {
        const auto row = m.row(x, a);
        rs.max_branching = std::max(rs.max_branching, row.size());
        for (const Transition& tr : row) next.insert(tr.next);
      }
    }
    std::vector<State> layer(next.begin(), next.end());
    std::sort(layer.begin(), layer.end());
    rs.layers.push_back(std::move(layer));
  }
  for (std::size_t t = 1; t <= h; ++t) rs.total_up_to_h += rs.layer(t).size();
  return rs;
}

LookaheadResult backward_pass(const ReachSets& rs, const Mdp& m, const Terminal& terminal, std::size_t h) {
  if (rs.depth != h || rs.layers.size() != h + 1) {
    throw ContractError("backward_pass: reach sets were built for a different depth");
  }

  // Values for the layer below the one being backed up.
  std::unordered_map<State, double> below;
  below.reserve(rs.layer(h + 1).size());
  for (State x : rs.layer(h + 1)) {
    const std::optional<double> v = terminal(x);
    if (!v) throw ContractError("backward_pass: terminal value missing for state " + std::to_string(x));
    below.emplace(x, *v);
  }

  const auto lookup = [&below](State x) { return below.at(x); };
  std::unordered_map<State, double> current;
  for (std::size_t t = h; t >= 2; --t) {
    current.clear();
    current.reserve(rs.layer(t).size());
    for (State x : rs.layer(t)) current.emplace(x, greedy_backup(m, x, lookup).value);
    std::swap(below, current);
  }

  const Backup root = greedy_backup(m, rs.origin, lookup);
  return {root.action, root.value, rs.total_up_to_h};
}

LookaheadResult lookahead_action(const Mdp& m, State s, std::size_t h, const Terminal& terminal) {
  return backward_pass(forward_pass(m, s, h), m, terminal, h);
}

double h_bellman(const Mdp& m, State s, std::size_t h, const Terminal& terminal) {
  if (s >= m.num_states()) throw std::out_of_range("h_bellman: state out of range");
  if (h == 0) {
    const std::optional<double> v = terminal(s);
    if (!v) throw ContractError("h_bellman: terminal value missing for state " + std::to_string(s));
    return *v;
  }
  return lookahead_action(m, s, h, terminal).root_value;
}

LookaheadResult abstract_lookahead(const Mdp& m, State s, std::size_t h,
                                   std::span<const double> terminal_abs,
                                   std::span<const std::size_t> phi) {
  return lookahead_action(m, s, h, Terminal::abstract(terminal_abs, phi));
}

namespace {

// Depth-first enumeration of all per-layer action assignments.
class PolicyEnumerator {
 public:
  PolicyEnumerator(const Mdp& m, std::vector<std::vector<State>> layers, std::vector<double> terminal)
      : m_(m), layers_(std::move(layers)), terminal_(std::move(terminal)) {
    const std::size_t h = layers_.size() - 1;
    index_.resize(h + 1);
    for (std::size_t t = 0; t <= h; ++t) {
      for (std::size_t i = 0; i < layers_[t].size(); ++i) index_[t].emplace(layers_[t][i], i);
    }
    dists_.resize(h + 1);
    dists_[0] = {1.0};
    choice_.resize(h);
    for (std::size_t t = 0; t < h; ++t) choice_[t].assign(layers_[t].size(), 0);
    best_.assign(m.num_actions(), -1.0);
  }

  std::vector<double> run() {
    visit(0, 0, 0.0);
    return best_;
  }

 private:
  void visit(std::size_t t, std::size_t i, double partial) {
    const std::size_t h = layers_.size() - 1;
    if (i == layers_[t].size()) {
      std::vector<double>& next = dists_[t + 1];
      next.assign(layers_[t + 1].size(), 0.0);
      for (std::size_t j = 0; j < layers_[t].size(); ++j) {
        const double mass = dists_[t][j];
        if (mass == 0.0) continue;
        for (const Transition& tr : m_.row(layers_[t][j], choice_[t][j])) {
          next[index_[t + 1].at(tr.next)] += mass * tr.prob;
        }
      }
      if (t + 1 == h) {
        double total = partial;
        for (std::size_t j = 0; j < next.size(); ++j) total += next[j] * terminal_[j];
        double& slot = best_[choice_[0][0]];
        slot = std::max(slot, total);
      } else {
        visit(t + 1, 0, partial);
      }
      return;
    }
    const State s = layers_[t][i];
    for (Action a = 0; a < m_.num_actions(); ++a) {
      choice_[t][i] = a;
      visit(t, i + 1, partial + dists_[t][i] * m_.reward(s, a));
    }
  }

  const Mdp& m_;
  std::vector<std::vector<State>> layers_;
  std::vector<double> terminal_;
  std::vector<std::unordered_map<State, std::size_t>> index_;
  std::vector<std::vector<double>> dists_;
  std::vector<std::vector<Action>> choice_;
  std::vector<double> best_;
};

}  // namespace

LookaheadResult exhaustive_lookahead(const Mdp& m, State s, std::size_t h, const Terminal& terminal,
                                     const ExhaustiveGuard& guard) {
  if (s >= m.num_states()) throw std::out_of_range("exhaustive_lookahead: state out of range");
  if (h == 0) throw ContractError("exhaustive_lookahead: depth must be at least 1");
  if (h > guard.max_depth || m.num_actions() > guard.max_actions) {
    throw RefusalError("exhaustive_lookahead: depth or action count exceeds the guard");
  }

  // Reachable layers by plain breadth-first expansion.
  std::vector<std::vector<State>> layers{{s}};
  std::size_t total = 1;
  for (std::size_t t = 1; t <= h; ++t) {
    std::vector<bool> hit(m.num_states(), false);
    for (State x : layers.back()) {
      for (Action a = 0; a < m.num_actions(); ++a) {
        for (const Transition& tr : m.row(x, a)) hit[tr.next] = true;
      }
    }
    std::vector<State> layer;
    for (State x = 0; x < m.num_states(); ++x) {
      if (hit[x]) layer.push_back(x);
    }
    layers.push_back(std::move(layer));
    if (t < h) total += layers.back().size();
    if (total > guard.max_reachable) {
      throw RefusalError("exhaustive_lookahead: reachable set exceeds the guard");
    }
  }

  std::vector<double> leaf;
  for (State x : layers.back()) {
    const std::optional<double> v = terminal(x);
    if (!v) throw ContractError("exhaustive_lookahead: terminal value missing for state " + std::to_string(x));
    leaf.push_back(*v);
  }

  const std::vector<double> best = PolicyEnumerator(m, std::move(layers), std::move(leaf)).run();
  const double top = *std::max_element(best.begin(), best.end());
  Action action = 0;
  while (best[action] < top - 1e-9) ++action;
  return {action, top, total};
}

}  // namespace hrtdp
