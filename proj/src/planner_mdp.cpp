#include "windplan/planner_mdp.hpp"

#include <cmath>
#include <stdexcept>

namespace windplan {

EfePlanner::EfePlanner(MdpModel model, int horizon)
    : model_(std::move(model)),
      horizon_(horizon),
      num_states_(model_.transitions.num_states()),
      num_actions_(model_.transitions.num_actions()) {
  if (horizon_ < 1) throw std::invalid_argument("horizon must be >= 1");
  if (static_cast<int>(model_.preferences.probs.size()) != num_states_)
    throw std::invalid_argument("preference vector length mismatch");
  if (model_.goal.value() > num_states_)
    throw std::out_of_range("goal outside the state space");

  // Absorb the goal in the planning tensor: staying put is the consistent
  // continuation once the preference peak is reached.
  const int goal0 = model_.goal.index0();
  for (int action = 0; action < num_actions_; ++action)
    for (int next = 0; next < num_states_; ++next)
      model_.transitions.at(next, goal0, action) = next == goal0 ? 1.0 : 0.0;

  build();
}

std::size_t EfePlanner::node_offset(int state0, int tau) const {
  return (static_cast<std::size_t>(tau - 1) * num_states_ + state0) *
         num_actions_;
}

void EfePlanner::build() {
  if (horizon_ < 2) return;  // a horizon of 1 leaves no decision to plan

  const auto& c = model_.preferences.probs;
  const std::size_t cells =
      static_cast<std::size_t>(horizon_ - 1) * num_states_ * num_actions_;
  g_.resize(cells);
  policy_.resize(cells);

  // The KL term of each (s, a) column is tau-independent; cache it along
  // with the sparse column support.
  std::vector<std::vector<std::pair<int, double>>> support(
      static_cast<std::size_t>(num_states_) * num_actions_);
  std::vector<double> risk(support.size());
  for (int s = 0; s < num_states_; ++s) {
    for (int a = 0; a < num_actions_; ++a) {
      auto& entries = support[static_cast<std::size_t>(s) * num_actions_ + a];
      double kl = 0.0;
      for (int next = 0; next < num_states_; ++next) {
        const double p = model_.transitions.at(next, s, a);
        if (p <= 0.0) continue;
        if (c[next] <= 0.0)
          throw std::domain_error("state preferences must be strictly positive");
        entries.emplace_back(next, p);
        kl += p * (std::log(p) - std::log(c[next]));
      }
      risk[static_cast<std::size_t>(s) * num_actions_ + a] = std::max(kl, 0.0);
    }
  }

  // Backward pass: expected_next[s'] carries E over Q(a'|s') of
  // G(a'|s', tau+1) into the tau sweep below it.
  std::vector<double> expected_next(num_states_, 0.0);
  std::vector<double> expected_here(num_states_, 0.0);
  for (int tau = horizon_ - 1; tau >= 1; --tau) {
    for (int s = 0; s < num_states_; ++s) {
      double* g_row = g_.data() + node_offset(s, tau);
      double* p_row = policy_.data() + node_offset(s, tau);
      for (int a = 0; a < num_actions_; ++a) {
        double value = risk[static_cast<std::size_t>(s) * num_actions_ + a];
        if (tau < horizon_ - 1) {
          for (const auto& [next, p] :
               support[static_cast<std::size_t>(s) * num_actions_ + a])
            value += p * expected_next[next];
        }
        g_row[a] = value;
      }
      std::vector<double> neg(num_actions_);
      for (int a = 0; a < num_actions_; ++a) neg[a] = -g_row[a];
      const std::vector<double> pi = softmax(neg);
      double expected = 0.0;
      for (int a = 0; a < num_actions_; ++a) {
        p_row[a] = pi[a];
        expected += pi[a] * g_row[a];
      }
      expected_here[s] = expected;
    }
    std::swap(expected_next, expected_here);
  }
}

double EfePlanner::efe(StateIndex s, int action, int tau) const {
  if (action < 0 || action >= num_actions_)
    throw std::out_of_range("action outside the action set");
  return efe_values(s, tau)[action];
}

std::span<const double> EfePlanner::efe_values(StateIndex s, int tau) const {
  if (tau < 1 || tau > horizon_ - 1)
    throw std::out_of_range("tau must lie in 1..horizon-1");
  if (s.value() > num_states_)
    throw std::out_of_range("state outside the state space");
  return {g_.data() + node_offset(s.index0(), tau),
          static_cast<std::size_t>(num_actions_)};
}

std::span<const double> EfePlanner::action_distribution(StateIndex s,
                                                        int tau) const {
  if (tau < 1 || tau > horizon_ - 1)
    throw std::out_of_range("tau must lie in 1..horizon-1");
  if (s.value() > num_states_)
    throw std::out_of_range("state outside the state space");
  return {policy_.data() + node_offset(s.index0(), tau),
          static_cast<std::size_t>(num_actions_)};
}

int sample_action(std::span<const double> dist, Rng& rng) {
  return sample_categorical(dist, rng);
}

EpisodeResult run_episode(const EfePlanner& planner, const Environment& env,
                          Rng& rng) {
  if (planner.num_states() != env.transitions.num_states() ||
      planner.num_actions() != env.transitions.num_actions())
    throw std::logic_error("model and environment tensor shapes differ");

  EpisodeResult result;
  StateIndex s = env.geometry.start;
  result.trajectory.push_back(s);
  result.reached_goal = s == env.geometry.goal;

  for (int tau = 1; tau <= planner.horizon() - 1 && !result.reached_goal;
       ++tau) {
    const int a = sample_action(planner.action_distribution(s, tau), rng);
    s = env.step(s, static_cast<Action>(a), rng);
    result.actions.push_back(a);
    result.trajectory.push_back(s);
    result.steps_used += 1;
    result.reached_goal = s == env.geometry.goal;
  }
  return result;
}

}  // namespace windplan
