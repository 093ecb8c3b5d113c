#include "windplan/learning.hpp"

#include <cmath>
#include <stdexcept>

namespace windplan {

DirichletCounts::DirichletCounts(int num_states, int num_actions, double alpha)
    : num_states(num_states),
      num_actions(num_actions),
      counts(static_cast<std::size_t>(num_states) * num_states * num_actions,
             alpha),
      alpha(alpha) {
  if (num_states < 1 || num_actions < 1)
    throw std::invalid_argument("counts need >= 1 state and action");
  if (alpha <= 0.0)
    throw std::invalid_argument("prior concentration must be positive");
}

double DirichletCounts::total() const {
  double sum = 0.0;
  for (double c : counts) sum += c;
  return sum;
}

void update_counts(DirichletCounts& counts, StateIndex prev, Action action,
                   StateIndex next, double weight) {
  if (weight <= 0.0) throw std::invalid_argument("weight must be positive");
  if (prev.value() > counts.num_states || next.value() > counts.num_states)
    throw std::out_of_range("state outside the count array");
  counts.at(next.index0(), prev.index0(), static_cast<int>(action)) += weight;
}

DirichletCounts explore_random(const Environment& env, std::uint64_t steps,
                               Rng& rng, double alpha, int max_episode_moves) {
  const int n = env.transitions.num_states();
  DirichletCounts counts(n, env.transitions.num_actions(), alpha);

  StateIndex s = env.geometry.start;
  int moves_in_episode = 0;
  for (std::uint64_t i = 0; i < steps; ++i) {
    const Action a = static_cast<Action>(rng.uniform_int(kNumActions));
    const StateIndex next = env.step(s, a, rng);
    update_counts(counts, s, a, next, 1.0);
    counts.steps += 1;
    moves_in_episode += 1;
    // A cap <= 0 disables the episode cap; the walk then resets at the goal
    // only, which covers the grid far better than start-anchored bursts.
    const bool capped =
        max_episode_moves > 0 && moves_in_episode >= max_episode_moves;
    if (next == env.geometry.goal || capped) {
      s = env.geometry.start;
      moves_in_episode = 0;
    } else {
      s = next;
    }
  }
  return counts;
}

double model_accuracy(const TransitionTensor& learned,
                      const TransitionTensor& truth) {
  if (learned.num_states() != truth.num_states() ||
      learned.num_actions() != truth.num_actions())
    throw std::invalid_argument("model_accuracy shape mismatch");
  const int n = learned.num_states();
  const int num_actions = learned.num_actions();
  double sum = 0.0;
  for (int prev = 0; prev < n; ++prev) {
    for (int action = 0; action < num_actions; ++action) {
      double l1 = 0.0;
      for (int next = 0; next < n; ++next)
        l1 += std::abs(learned.at(next, prev, action) -
                       truth.at(next, prev, action));
      sum += 0.5 * l1;
    }
  }
  return sum / (static_cast<double>(n) * num_actions);
}

}  // namespace windplan
