#pragma once

#include <cstdint>
#include <vector>

#include "windplan/genmodel.hpp"
#include "windplan/gridworld.hpp"

namespace windplan {

/// Per-action Dirichlet concentration parameters over observed transitions,
/// indexed like a transition tensor: [next_state, prev_state, action].
/// Initialized to the prior alpha everywhere; counts only ever increase.
struct DirichletCounts {
  int num_states = 0;
  int num_actions = 0;
  std::vector<double> counts;
  double alpha = 1.0;
  std::uint64_t steps = 0;  // environment transitions accumulated

  DirichletCounts() = default;
  DirichletCounts(int num_states, int num_actions, double alpha);

  double& at(int next, int prev, int action) {
    return counts[(static_cast<std::size_t>(next) * num_states + prev) *
                      num_actions +
                  action];
  }
  double at(int next, int prev, int action) const {
    return counts[(static_cast<std::size_t>(next) * num_states + prev) *
                      num_actions +
                  action];
  }

  double total() const;
};

/// Rank-1 increment for one observed transition: the outer product of one-hot
/// state vectors touches exactly one cell.
void update_counts(DirichletCounts& counts, StateIndex prev, Action action,
                   StateIndex next, double weight = 1.0);

/// Random exploration from the start state: sample uniform actions, step the
/// true environment, accumulate unit-weight counts. Episodes reset at the
/// goal, and additionally after max_episode_moves transitions when the cap
/// is positive (a cap <= 0 lets the walk run free between goal visits).
DirichletCounts explore_random(const Environment& env, std::uint64_t steps,
                               Rng& rng, double alpha,
                               int max_episode_moves = 0);

/// Mean over all (prev, action) columns of half the L1 distance between the
/// two tensors' columns. 0 iff identical, at most 1.
double model_accuracy(const TransitionTensor& learned,
                      const TransitionTensor& truth);

}  // namespace windplan
