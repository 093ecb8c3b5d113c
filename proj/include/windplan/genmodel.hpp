#pragma once

#include <compare>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "windplan/rng.hpp"

namespace windplan {

/// Raised when an observation has zero marginal likelihood under the current
/// belief, i.e. the model cannot explain what the environment produced.
struct InferenceError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// 1-based state id. The grid bijection (down/side coordinates) lives in
/// gridworld; here a state is just an index into probability vectors.
class StateIndex {
 public:
  StateIndex() = default;
  explicit StateIndex(int value) : value_(value) {
    if (value < 1) throw std::out_of_range("StateIndex must be >= 1");
  }

  int value() const { return value_; }
  int index0() const { return value_ - 1; }

  auto operator<=>(const StateIndex&) const = default;

 private:
  int value_ = 1;
};

/// Dense per-action state-to-state categorical kernels, indexed
/// [next_state, prev_state, action]. Every (prev, action) column is a
/// probability vector over next states.
class TransitionTensor {
 public:
  TransitionTensor() = default;
  TransitionTensor(int num_states, int num_actions, double fill = 0.0)
      : num_states_(num_states),
        num_actions_(num_actions),
        data_(static_cast<std::size_t>(num_states) * num_states * num_actions,
              fill) {
    if (num_states < 1 || num_actions < 1)
      throw std::invalid_argument("TransitionTensor needs >= 1 state and action");
  }

  int num_states() const { return num_states_; }
  int num_actions() const { return num_actions_; }

  double& at(int next, int prev, int action) {
    return data_[offset(next, prev, action)];
  }
  double at(int next, int prev, int action) const {
    return data_[offset(next, prev, action)];
  }

  /// Distribution over next states for a given (prev, action) column.
  std::vector<double> column(int prev, int action) const;

  /// Row-major storage with shape [num_states, num_states, num_actions].
  const std::vector<double>& data() const { return data_; }
  std::vector<double>& data() { return data_; }

  /// Throws std::logic_error unless every column is a probability vector.
  void validate(double tol = 1e-9) const;

 private:
  std::size_t offset(int next, int prev, int action) const {
    return (static_cast<std::size_t>(next) * num_states_ + prev) * num_actions_ +
           action;
  }

  int num_states_ = 0;
  int num_actions_ = 0;
  std::vector<double> data_;
};

/// Per-modality observation tensors indexed [outcome, state], plus the
/// outcome alphabet (the distinct symbol values) for each modality.
class LikelihoodModel {
 public:
  struct Modality {
    std::vector<int> alphabet;  // ascending symbol values
    std::vector<double> probs;  // [num_outcomes x num_states], row-major
    int num_outcomes() const { return static_cast<int>(alphabet.size()); }

    double at(int outcome, int state0, int num_states) const {
      return probs[static_cast<std::size_t>(outcome) * num_states + state0];
    }
    /// Index of a symbol value in the alphabet, or -1 if absent.
    int outcome_index(int value) const;
  };

  LikelihoodModel() = default;
  LikelihoodModel(int num_states, std::vector<Modality> modalities);

  int num_states() const { return num_states_; }
  int num_modalities() const { return static_cast<int>(modalities_.size()); }
  const Modality& modality(int m) const { return modalities_[m]; }

  double at(int m, int outcome, int state0) const {
    return modalities_[m].at(outcome, state0, num_states_);
  }

  /// Joint observation entropy of one state, summed over modalities (the
  /// modalities are conditionally independent given the state). In nats.
  double observation_entropy(int state0) const;

  /// Throws std::logic_error unless each state column sums to 1 per modality.
  void validate(double tol = 1e-9) const;

 private:
  int num_states_ = 0;
  std::vector<Modality> modalities_;
};

/// Joint-outcome bookkeeping shared by the belief planner and the tabular
/// learner that consumes observations: the alphabet of realizable joint
/// outcomes (one outcome index per modality) and each state's support on it.
struct JointOutcomes {
  std::vector<std::vector<int>> alphabet;  // sorted lexicographically
  /// per state: (alphabet index, probability) pairs with probability > 0
  std::vector<std::vector<std::pair<int, double>>> per_state;

  int size() const { return static_cast<int>(alphabet.size()); }
  /// Alphabet index of a joint outcome given as modality outcome indices,
  /// or -1 if not realizable.
  int index_of(const std::vector<int>& outcome) const;
};

JointOutcomes enumerate_joint_outcomes(const LikelihoodModel& likelihood);

/// Smoothed goal preference distribution: mass 1 at the goal entry, epsilon
/// elsewhere, normalized. Strictly positive so KL against it stays finite.
struct PreferenceVector {
  std::vector<double> probs;
  double epsilon = 0.0;
};

/// Builds preferences over n atoms with the peak at 0-based index goal0.
PreferenceVector make_preferences_at(int goal0, double epsilon, int n);
/// Same, with the peak at a 1-based state id (the usual state-space case).
PreferenceVector make_preferences(StateIndex goal, double epsilon, int n);

/// Categorical belief over hidden states.
using BeliefState = std::vector<double>;

/// KL divergence sum q_i (ln q_i - ln c_i) with 0 ln 0 := 0. Throws
/// std::domain_error if some c_i = 0 where q_i > 0.
double kl_divergence(std::span<const double> q, std::span<const double> c);

/// Shannon entropy in nats with 0 ln 0 := 0.
double entropy(std::span<const double> p);

/// softmax(logits) with max-subtraction; strictly positive, sums to 1.
std::vector<double> softmax(std::span<const double> logits);

bool is_distribution(std::span<const double> p, double tol = 1e-9);
void normalize(std::vector<double>& p);

/// Categorical draw from a normalized distribution. Throws std::logic_error
/// when the input does not sum to 1 within tol.
int sample_categorical(std::span<const double> probs, Rng& rng,
                       double tol = 1e-9);

struct DirichletCounts;

/// Normalizes Dirichlet concentration parameters column-wise into a
/// transition tensor. Throws std::domain_error on an all-zero column.
TransitionTensor normalize_counts(const DirichletCounts& counts);

}  // namespace windplan
