#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <unordered_map>
#include <vector>

#include "windplan/genmodel.hpp"
#include "windplan/gridworld.hpp"
#include "windplan/planner_mdp.hpp"

namespace windplan {

/// Occam's-window thresholds: outcome branches with posterior probability
/// <= outcome_threshold are dropped from the search tree, and next actions
/// with softmax prior <= action_threshold are excluded from the recursion.
struct PruningConfig {
  double outcome_threshold = 1.0 / 16.0;
  double action_threshold = 1.0 / 16.0;
};

/// Generative model for the partially observable level: believed dynamics,
/// the two-modality likelihood, and the goal whose joint outcome anchors the
/// preference distribution over outcomes.
struct PomdpModel {
  TransitionTensor transitions;
  LikelihoodModel likelihood;
  StateIndex goal{1};
  double preference_epsilon = 1e-12;
};

/// One-step prediction: push the belief through the action's kernel.
BeliefState belief_predict(const BeliefState& b, int action,
                           const TransitionTensor& transitions);

/// Exact Bayes posterior given modality outcome values: pointwise product of
/// the prediction with every modality likelihood column, renormalized. For a
/// single discrete factor this is also the variational free-energy minimum.
/// Throws InferenceError when the observation has zero marginal likelihood.
BeliefState belief_update(const BeliefState& b_pred,
                          const std::vector<int>& outcome_values,
                          const LikelihoodModel& likelihood);
BeliefState belief_update(const BeliefState& b_pred, ObservationPair o,
                          const LikelihoodModel& likelihood);

/// Counters for the search tree of one planner instance.
struct TreeStats {
  std::uint64_t node_visits = 0;      // g-vector requests, memo hits included
  std::uint64_t nodes_expanded = 0;   // g-vectors actually computed
  std::uint64_t obs_branches_kept = 0;
  std::uint64_t obs_branches_total = 0;
};

/// Recursive expected-free-energy planner over belief states.
///
/// G(a | b, tau) = risk + ambiguity + expected future G, where risk is the
/// KL divergence of the predicted joint-outcome distribution from the
/// outcome preferences, ambiguity is the expected observation entropy of the
/// predicted states, and the future term averages the recursion over
/// surviving outcome branches (Bayes posteriors) and surviving next actions,
/// both renormalized after pruning so the average stays proper.
///
/// Results are memoized per (belief, tau); identical sub-beliefs reached
/// through different branches share one evaluation, which keeps the tree
/// tractable when posteriors collapse to few states.
class BeliefPlanner {
 public:
  BeliefPlanner(PomdpModel model, int horizon, PruningConfig pruning = {});

  int horizon() const { return horizon_; }
  int num_actions() const { return num_actions_; }
  const PomdpModel& model() const { return model_; }
  const PreferenceVector& outcome_preferences() const { return outcome_prefs_; }
  const JointOutcomes& joint_outcomes() const { return joint_; }
  const PruningConfig& pruning() const { return pruning_; }

  /// G(a | b, tau); tau in 1..horizon-1.
  double efe_belief(const BeliefState& b, int action, int tau);
  std::vector<double> efe_values(const BeliefState& b, int tau);

  /// softmax(-G) over the full action set; pruning only applies inside the
  /// recursion, never to the root distribution.
  std::vector<double> action_probabilities(const BeliefState& b, int tau);

  /// Predicted joint-outcome distribution over the alphabet for one action.
  std::vector<double> predict_outcomes(const BeliefState& b, int action) const;

  const TreeStats& stats() const { return stats_; }
  void reset_stats() { stats_ = {}; }
  std::size_t memo_size() const { return memo_.size(); }

 private:
  std::span<const double> g_values(const BeliefState& b, int tau);
  std::vector<double> compute_g(const BeliefState& b, int tau);
  /// Canonical memo key: tau plus the belief support with probabilities
  /// quantized to 1e-12, packed into a byte string compared exactly.
  std::string belief_key(const BeliefState& b, int tau) const;

  PomdpModel model_;
  int horizon_;
  int num_states_;
  int num_actions_;
  PruningConfig pruning_;
  JointOutcomes joint_;
  PreferenceVector outcome_prefs_;
  std::vector<double> obs_entropy_;  // per state
  std::unordered_map<std::string, std::vector<double>> memo_;
  TreeStats stats_;
};

enum class InitialBelief { StartPointMass, Uniform };

struct PomdpEpisodeOptions {
  InitialBelief initial_belief = InitialBelief::StartPointMass;
  /// When set, one JSON line is appended per step:
  /// {tau, belief_topk, chosen_action, action_probs, observed}.
  std::ostream* trace = nullptr;
};

/// Belief-space rollout: plan at the current belief, sample an action, step
/// the true environment, observe, filter. Terminates on the goal observation
/// or at the horizon.
EpisodeResult run_episode_pomdp(BeliefPlanner& planner, const Environment& env,
                                Rng& rng, const PomdpEpisodeOptions& options = {});

}  // namespace windplan
