#include "windplan/planner_pomdp.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <ostream>

#include <json.hpp>

namespace windplan {

BeliefState belief_predict(const BeliefState& b, int action,
                           const TransitionTensor& transitions) {
  const int n = transitions.num_states();
  if (static_cast<int>(b.size()) != n)
    throw std::invalid_argument("belief length mismatch");
  if (action < 0 || action >= transitions.num_actions())
    throw std::out_of_range("action outside the action set");

  BeliefState out(n, 0.0);
  for (int prev = 0; prev < n; ++prev) {
    const double mass = b[prev];
    if (mass <= 0.0) continue;
    for (int next = 0; next < n; ++next)
      out[next] += transitions.at(next, prev, action) * mass;
  }
  normalize(out);
  return out;
}

namespace {

/// Posterior given one outcome index per modality; nullptr-free core shared
/// by the public belief_update overloads and the planner's branch updates.
BeliefState update_with_outcome_indices(const BeliefState& b_pred,
                                        const std::vector<int>& outcome_idx,
                                        const LikelihoodModel& likelihood) {
  const int n = likelihood.num_states();
  BeliefState posterior(b_pred);
  for (int m = 0; m < likelihood.num_modalities(); ++m) {
    const int o = outcome_idx[m];
    for (int s = 0; s < n; ++s)
      if (posterior[s] > 0.0) posterior[s] *= likelihood.at(m, o, s);
  }
  double total = 0.0;
  for (double p : posterior) total += p;
  if (total <= 0.0)
    throw InferenceError(
        "observation has zero likelihood under the predictive belief");
  for (double& p : posterior) p /= total;
  return posterior;
}

}  // namespace

BeliefState belief_update(const BeliefState& b_pred,
                          const std::vector<int>& outcome_values,
                          const LikelihoodModel& likelihood) {
  if (static_cast<int>(b_pred.size()) != likelihood.num_states())
    throw std::invalid_argument("belief length mismatch");
  if (static_cast<int>(outcome_values.size()) != likelihood.num_modalities())
    throw std::invalid_argument("one outcome value per modality required");

  std::vector<int> outcome_idx(outcome_values.size());
  for (int m = 0; m < likelihood.num_modalities(); ++m) {
    outcome_idx[m] = likelihood.modality(m).outcome_index(outcome_values[m]);
    if (outcome_idx[m] < 0)
      throw InferenceError("observed symbol outside the outcome alphabet");
  }
  return update_with_outcome_indices(b_pred, outcome_idx, likelihood);
}

BeliefState belief_update(const BeliefState& b_pred, ObservationPair o,
                          const LikelihoodModel& likelihood) {
  if (likelihood.num_modalities() != 2)
    throw std::invalid_argument("observation pairs need a two-modality model");
  return belief_update(b_pred, std::vector<int>{o.sum, o.product}, likelihood);
}

BeliefPlanner::BeliefPlanner(PomdpModel model, int horizon,
                             PruningConfig pruning)
    : model_(std::move(model)),
      horizon_(horizon),
      num_states_(model_.transitions.num_states()),
      num_actions_(model_.transitions.num_actions()),
      pruning_(pruning) {
  if (horizon_ < 1) throw std::invalid_argument("horizon must be >= 1");
  if (model_.likelihood.num_states() != num_states_)
    throw std::invalid_argument("likelihood state count mismatch");
  if (model_.goal.value() > num_states_)
    throw std::out_of_range("goal outside the state space");
  if (pruning_.outcome_threshold < 0.0 || pruning_.outcome_threshold >= 1.0 ||
      pruning_.action_threshold < 0.0 || pruning_.action_threshold >= 1.0)
    throw std::invalid_argument("pruning thresholds must lie in [0, 1)");

  const int goal0 = model_.goal.index0();
  for (int action = 0; action < num_actions_; ++action)
    for (int next = 0; next < num_states_; ++next)
      model_.transitions.at(next, goal0, action) = next == goal0 ? 1.0 : 0.0;

  joint_ = enumerate_joint_outcomes(model_.likelihood);

  // The preference peak sits on the goal state's joint outcome (its most
  // likely combination, which is the only one when the likelihood is
  // deterministic).
  std::vector<int> goal_outcome(model_.likelihood.num_modalities());
  for (int m = 0; m < model_.likelihood.num_modalities(); ++m) {
    const auto& modality = model_.likelihood.modality(m);
    int best = 0;
    for (int o = 1; o < modality.num_outcomes(); ++o)
      if (modality.at(o, goal0, num_states_) >
          modality.at(best, goal0, num_states_))
        best = o;
    goal_outcome[m] = best;
  }
  const int goal_idx = joint_.index_of(goal_outcome);
  if (goal_idx < 0)
    throw std::logic_error("goal outcome missing from the joint alphabet");
  outcome_prefs_ =
      make_preferences_at(goal_idx, model_.preference_epsilon, joint_.size());

  obs_entropy_.resize(num_states_);
  for (int s = 0; s < num_states_; ++s)
    obs_entropy_[s] = model_.likelihood.observation_entropy(s);
}

std::string BeliefPlanner::belief_key(const BeliefState& b, int tau) const {
  std::string key;
  key.reserve(4 + 12 * 4);
  const auto append = [&key](const void* bytes, std::size_t len) {
    key.append(static_cast<const char*>(bytes), len);
  };
  const std::int32_t t = tau;
  append(&t, sizeof(t));
  for (std::int32_t s = 0; s < num_states_; ++s) {
    const std::int64_t q = std::llround(b[s] * 1e12);
    if (q == 0) continue;
    append(&s, sizeof(s));
    append(&q, sizeof(q));
  }
  return key;
}

std::span<const double> BeliefPlanner::g_values(const BeliefState& b,
                                                int tau) {
  stats_.node_visits += 1;
  const std::string key = belief_key(b, tau);
  if (auto it = memo_.find(key); it != memo_.end()) return it->second;

  stats_.nodes_expanded += 1;
  std::vector<double> g = compute_g(b, tau);
  auto [it, inserted] = memo_.emplace(std::move(key), std::move(g));
  return it->second;
}

std::vector<double> BeliefPlanner::predict_outcomes(const BeliefState& b,
                                                    int action) const {
  const BeliefState predicted = belief_predict(b, action, model_.transitions);
  std::vector<double> q_o(joint_.size(), 0.0);
  for (int s = 0; s < num_states_; ++s) {
    if (predicted[s] <= 0.0) continue;
    for (const auto& [idx, p] : joint_.per_state[s])
      q_o[idx] += predicted[s] * p;
  }
  return q_o;
}

std::vector<double> BeliefPlanner::compute_g(const BeliefState& b, int tau) {
  std::vector<double> g(num_actions_, 0.0);
  for (int action = 0; action < num_actions_; ++action) {
    const BeliefState predicted =
        belief_predict(b, action, model_.transitions);

    std::vector<double> q_o(joint_.size(), 0.0);
    double ambiguity = 0.0;
    for (int s = 0; s < num_states_; ++s) {
      if (predicted[s] <= 0.0) continue;
      for (const auto& [idx, p] : joint_.per_state[s])
        q_o[idx] += predicted[s] * p;
      ambiguity += predicted[s] * obs_entropy_[s];
    }
    const double risk = kl_divergence(q_o, outcome_prefs_.probs);
    double value = risk + ambiguity;

    if (tau < horizon_ - 1) {
      // Occam's window over outcome branches: keep strictly above the
      // threshold and renormalize the survivors so the future term stays a
      // proper average.
      std::vector<std::pair<int, double>> branches;
      double kept_mass = 0.0;
      for (int idx = 0; idx < joint_.size(); ++idx) {
        if (q_o[idx] <= 0.0) continue;
        stats_.obs_branches_total += 1;
        if (q_o[idx] <= pruning_.outcome_threshold) continue;
        stats_.obs_branches_kept += 1;
        branches.emplace_back(idx, q_o[idx]);
        kept_mass += q_o[idx];
      }
      // If the window empties (many near-uniform branches), the tree is
      // truncated here and the future term is dropped.
      double future = 0.0;
      for (const auto& [idx, q] : branches) {
        const BeliefState posterior = update_with_outcome_indices(
            predicted, joint_.alphabet[idx], model_.likelihood);
        const std::span<const double> child = g_values(posterior, tau + 1);
        std::vector<double> neg(num_actions_);
        for (int a = 0; a < num_actions_; ++a) neg[a] = -child[a];
        const std::vector<double> prior = softmax(neg);

        double action_mass = 0.0;
        double expected = 0.0;
        for (int a = 0; a < num_actions_; ++a) {
          if (prior[a] <= pruning_.action_threshold) continue;
          action_mass += prior[a];
          expected += prior[a] * child[a];
        }
        if (action_mass > 0.0) future += (q / kept_mass) * (expected / action_mass);
      }
      value += future;
    }
    g[action] = value;
  }
  return g;
}

double BeliefPlanner::efe_belief(const BeliefState& b, int action, int tau) {
  if (action < 0 || action >= num_actions_)
    throw std::out_of_range("action outside the action set");
  return efe_values(b, tau)[action];
}

std::vector<double> BeliefPlanner::efe_values(const BeliefState& b, int tau) {
  if (tau < 1 || tau > horizon_ - 1)
    throw std::out_of_range("tau must lie in 1..horizon-1");
  if (static_cast<int>(b.size()) != num_states_)
    throw std::invalid_argument("belief length mismatch");
  if (!is_distribution(b, 1e-9))
    throw std::invalid_argument("belief is not normalized");
  const std::span<const double> values = g_values(b, tau);
  return {values.begin(), values.end()};
}

std::vector<double> BeliefPlanner::action_probabilities(const BeliefState& b,
                                                        int tau) {
  const std::vector<double> g = efe_values(b, tau);
  std::vector<double> neg(g.size());
  for (std::size_t a = 0; a < g.size(); ++a) neg[a] = -g[a];
  return softmax(neg);
}

EpisodeResult run_episode_pomdp(BeliefPlanner& planner, const Environment& env,
                                Rng& rng,
                                const PomdpEpisodeOptions& options) {
  const auto& geometry = env.geometry;
  if (planner.model().transitions.num_states() !=
          env.transitions.num_states() ||
      planner.num_actions() != env.transitions.num_actions())
    throw std::logic_error("model and environment tensor shapes differ");
  const int n = env.transitions.num_states();

  BeliefState belief(n, 0.0);
  if (options.initial_belief == InitialBelief::StartPointMass)
    belief[geometry.start.index0()] = 1.0;
  else
    belief.assign(n, 1.0 / n);
  // Incorporate the first observation; with a fixed start this is a no-op,
  // with a uniform prior it performs the initial disambiguation.
  belief = belief_update(belief, observe(geometry.start, geometry),
                         planner.model().likelihood);

  EpisodeResult result;
  StateIndex s = geometry.start;
  result.trajectory.push_back(s);
  result.reached_goal = s == geometry.goal;

  for (int tau = 1; tau <= planner.horizon() - 1 && !result.reached_goal;
       ++tau) {
    const std::vector<double> probs = planner.action_probabilities(belief, tau);
    const int a = sample_categorical(probs, rng);
    s = env.step(s, static_cast<Action>(a), rng);
    const ObservationPair o = observe(s, geometry);
    belief = belief_update(
        belief_predict(belief, a, planner.model().transitions), o,
        planner.model().likelihood);

    if (options.trace) {
      std::vector<std::pair<int, double>> ranked;
      for (int i = 0; i < n; ++i)
        if (belief[i] > 0.0) ranked.emplace_back(i + 1, belief[i]);
      std::sort(ranked.begin(), ranked.end(),
                [](const auto& l, const auto& r) { return l.second > r.second; });
      if (ranked.size() > 5) ranked.resize(5);
      nlohmann::json line{{"tau", tau},
                          {"belief_topk", ranked},
                          {"chosen_action", kActionNames[a]},
                          {"action_probs", probs},
                          {"observed", {o.sum, o.product}}};
      *options.trace << line.dump() << '\n';
    }

    result.actions.push_back(a);
    result.trajectory.push_back(s);
    result.steps_used += 1;
    result.reached_goal = s == geometry.goal;
  }
  return result;
}

}  // namespace windplan
