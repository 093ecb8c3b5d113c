#pragma once

#include <span>
#include <vector>

#include "windplan/genmodel.hpp"
#include "windplan/gridworld.hpp"

namespace windplan {

/// The agent's generative model for the fully observable levels: believed
/// dynamics plus a smoothed goal preference over states.
struct MdpModel {
  TransitionTensor transitions;
  PreferenceVector preferences;  // over states
  StateIndex goal{1};
};

struct EpisodeResult {
  std::vector<StateIndex> trajectory;  // s_1 .. s_end, starts at the start state
  std::vector<int> actions;            // a_1 .. a_steps_used
  bool reached_goal = false;
  int steps_used = 0;  // actions taken; <= horizon - 1
};

/// Recursive expected-free-energy planner over a finite horizon.
///
/// G(a | s, tau) is the KL divergence of the predicted next-state
/// distribution from the preference vector, plus, for tau < T-1, the
/// expected G of the next step under the predicted state and the softmax
/// action distribution Q(a' | s') = softmax(-G(. | s', tau+1)).
///
/// The table is keyed (state, tau) with tau in 1..T-1 and is built once per
/// horizon; episodes and threads may then read it concurrently. The goal is
/// made absorbing in the planning copy of the tensor so remaining-step terms
/// after arrival are well defined.
class EfePlanner {
 public:
  EfePlanner(MdpModel model, int horizon);

  int horizon() const { return horizon_; }
  int num_states() const { return num_states_; }
  int num_actions() const { return num_actions_; }
  const TransitionTensor& planning_tensor() const { return model_.transitions; }

  /// G(a | s, tau); tau in 1..horizon-1.
  double efe(StateIndex s, int action, int tau) const;
  std::span<const double> efe_values(StateIndex s, int tau) const;

  /// softmax(-G(U | s, tau)); strictly positive, sums to 1.
  std::span<const double> action_distribution(StateIndex s, int tau) const;

  /// Number of memoized (state, tau) entries times actions.
  std::size_t table_size() const { return g_.size(); }

 private:
  std::size_t node_offset(int state0, int tau) const;
  void build();

  MdpModel model_;
  int horizon_;
  int num_states_;
  int num_actions_;
  std::vector<double> g_;       // [tau][state][action], tau in 1..horizon-1
  std::vector<double> policy_;  // same layout
};

/// Categorical draw from a normalized action distribution.
int sample_action(std::span<const double> dist, Rng& rng);

/// Rolls one episode: plan at the current (s, tau), sample an action, step
/// the true environment; halts on goal arrival or when tau reaches the
/// horizon. The model tensor and the true tensor may differ (learned case).
EpisodeResult run_episode(const EfePlanner& planner, const Environment& env,
                          Rng& rng);

}  // namespace windplan
