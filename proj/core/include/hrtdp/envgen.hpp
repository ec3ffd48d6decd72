#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "hrtdp/mdp.hpp"
#include "hrtdp/variant.hpp"

namespace hrtdp {

enum class Family { kChain, kGridworld, kRandom };

// Instance generator parameters.
//   chain:     num_states in a line, actions {stay, fwd}; reward 1 at the last state.
//              slip is the probability that fwd stays put.
//   gridworld: width x height cells, actions {up, down, left, right}; reward 1 at
//              the far corner plus sparse random cell rewards; slip stays put.
//   random:    num_states x num_actions, each row has a uniformly drawn support of
//              1..branching states with normalized positive weights.
struct GenSpec {
  Family family = Family::kRandom;
  std::size_t num_states = 3;
  std::size_t width = 0;
  std::size_t height = 0;
  std::size_t num_actions = 2;
  std::size_t horizon = 2;
  std::size_t branching = 2;
  double reward_density = 1.0;  // fraction of (s, a) pairs (cells for gridworld) with a random reward
  double slip = 0.0;
  std::uint64_t seed = 0;
  InitSchedule init = InitSchedule::round_robin();
};

Mdp gen(const GenSpec& spec);

// Mixes each row toward a seeded distribution q over the row's support plus
// one extra seeded state: p_hat = (1 - eps_P/2) p + (eps_P/2) q, so the l1
// distance to p is at most eps_P. Rewards are unchanged.
Mdp perturb_model(const Mdp& m, double eps_p, std::uint64_t seed);

// (1 - alpha) p + alpha q over the union of both supports.
std::vector<Transition> mix_rows(std::span<const Transition> p, std::span<const Transition> q, double alpha);

// Sum of |p(s') - q(s')| over the union of supports.
double l1_distance(std::span<const Transition> p, std::span<const Transition> q);

ValueNoise make_value_noise(double eps_v, std::uint64_t seed);

// Buckets states by floor(V*_{nh+1}(s) / eps_A) at every checkpoint (exact
// value equality when eps_A = 0). Requires solving the MDP first; meant for
// building certified abstractions in experiments.
AbstractionMap build_abstraction(const Mdp& m, std::size_t h, double eps_a);

// Largest V*_{nh+1} spread inside any class of the map.
double abstraction_spread(const Mdp& m, std::size_t h, const AbstractionMap& map);

// Disjoint union of `copies` copies of m; copy c occupies states
// [c*S, (c+1)*S). The initial schedule is kept, so starts stay in copy 0
// when it is fixed or limited to S states.
Mdp replicate(const Mdp& m, std::size_t copies);

}  // namespace hrtdp
