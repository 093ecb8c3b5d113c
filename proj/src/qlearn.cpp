#include "windplan/qlearn.hpp"

#include <stdexcept>

namespace windplan {

namespace {

int best_action_with_ties(const QTable& table, int obs, Rng& rng) {
  double best = table.at(obs, 0);
  int count = 1;
  for (int a = 1; a < table.num_actions; ++a) {
    const double v = table.at(obs, a);
    if (v > best) {
      best = v;
      count = 1;
    } else if (v == best) {
      count += 1;
    }
  }
  // Reservoir-free uniform pick among the maximal actions.
  int pick = rng.uniform_int(count);
  for (int a = 0; a < table.num_actions; ++a) {
    if (table.at(obs, a) == best && pick-- == 0) return a;
  }
  return table.num_actions - 1;
}

}  // namespace

int QTable::greedy_action(int obs, Rng& rng) const {
  if (obs < 0 || obs >= num_obs)
    throw std::out_of_range("observation outside the table");
  return best_action_with_ties(*this, obs, rng);
}

QTable train(const Environment& env, const QTrainConfig& config, Rng& rng) {
  if (config.max_episode_moves < 1)
    throw std::invalid_argument("episode cap must be >= 1");
  const int num_actions = env.transitions.num_actions();
  const int num_obs =
      config.num_obs > 0 ? config.num_obs : env.transitions.num_states();
  const auto index_of = [&](StateIndex s) {
    return config.indexer ? config.indexer(s) : s.index0();
  };

  QTable table(num_obs, num_actions);
  table.exploration_rate = config.exploration_rate;
  table.learning_rate = config.learning_rate;
  table.discount = config.discount;

  StateIndex s = env.geometry.start;
  int obs = index_of(s);
  int moves_in_episode = 0;
  for (std::uint64_t i = 0; i < config.steps; ++i) {
    int action;
    if (rng.uniform_double() < config.exploration_rate)
      action = rng.uniform_int(num_actions);
    else
      action = best_action_with_ties(table, obs, rng);

    const StateIndex next = env.step(s, static_cast<Action>(action), rng);
    const int next_obs = index_of(next);
    const bool terminal = next == env.geometry.goal;
    const double reward = terminal ? 0.0 : -1.0;

    double target = reward;
    if (!terminal) {
      double best = table.at(next_obs, 0);
      for (int a = 1; a < num_actions; ++a)
        best = std::max(best, table.at(next_obs, a));
      target += config.discount * best;
    }
    table.at(obs, action) +=
        config.learning_rate * (target - table.at(obs, action));

    moves_in_episode += 1;
    if (terminal || moves_in_episode >= config.max_episode_moves) {
      s = env.geometry.start;
      moves_in_episode = 0;
    } else {
      s = next;
    }
    obs = index_of(s);
  }
  return table;
}

EpisodeResult greedy_episode(const QTable& table, const Environment& env,
                             int horizon, Rng& rng, double eval_exploration,
                             const ObservationIndexer& indexer) {
  if (horizon < 1) throw std::invalid_argument("horizon must be >= 1");
  const auto index_of = [&](StateIndex s) {
    return indexer ? indexer(s) : s.index0();
  };

  EpisodeResult result;
  StateIndex s = env.geometry.start;
  result.trajectory.push_back(s);
  result.reached_goal = s == env.geometry.goal;

  for (int tau = 1; tau <= horizon - 1 && !result.reached_goal; ++tau) {
    int action;
    if (eval_exploration > 0.0 && rng.uniform_double() < eval_exploration)
      action = rng.uniform_int(table.num_actions);
    else
      action = table.greedy_action(index_of(s), rng);

    s = env.step(s, static_cast<Action>(action), rng);
    result.actions.push_back(action);
    result.trajectory.push_back(s);
    result.steps_used += 1;
    result.reached_goal = s == env.geometry.goal;
  }
  return result;
}

}  // namespace windplan
