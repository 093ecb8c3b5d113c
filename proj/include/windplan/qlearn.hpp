#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "windplan/gridworld.hpp"
#include "windplan/planner_mdp.hpp"

namespace windplan {

/// Maps an environment state to the index the tabular learner sees: the
/// state itself on fully observable levels, the joint observation-pair index
/// under partial observability.
using ObservationIndexer = std::function<int(StateIndex)>;

/// Tabular action values with the training hyperparameters.
struct QTable {
  int num_obs = 0;
  int num_actions = 0;
  std::vector<double> values;  // [obs, action], row-major
  double exploration_rate = 0.1;
  double learning_rate = 0.5;
  double discount = 1.0;

  QTable() = default;
  QTable(int num_obs, int num_actions)
      : num_obs(num_obs),
        num_actions(num_actions),
        values(static_cast<std::size_t>(num_obs) * num_actions, 0.0) {}

  double& at(int obs, int action) {
    return values[static_cast<std::size_t>(obs) * num_actions + action];
  }
  double at(int obs, int action) const {
    return values[static_cast<std::size_t>(obs) * num_actions + action];
  }

  /// argmax over actions with seeded uniform tie-breaking.
  int greedy_action(int obs, Rng& rng) const;
};

struct QTrainConfig {
  std::uint64_t steps = 5000;   // environment transitions, not episodes
  int max_episode_moves = 19;   // reset cap, mirrors the evaluation horizon
  double exploration_rate = 0.1;
  double learning_rate = 0.5;
  double discount = 1.0;
  /// empty -> identity over states (fully observable)
  ObservationIndexer indexer;
  int num_obs = 0;  // 0 -> env state count
};

/// One-step Q-learning with epsilon-greedy behavior. Reward is -1 per step
/// and 0 on the transition entering the goal; the goal is terminal, so the
/// entering update does not bootstrap. Reproducible bit-for-bit per seed.
QTable train(const Environment& env, const QTrainConfig& config, Rng& rng);

/// Greedy rollout on the true environment for at most horizon-1 moves.
/// eval_exploration is the probability of a uniform random action at
/// evaluation time (0 = pure greedy).
EpisodeResult greedy_episode(const QTable& table, const Environment& env,
                             int horizon, Rng& rng,
                             double eval_exploration = 0.0,
                             const ObservationIndexer& indexer = {});

}  // namespace windplan
