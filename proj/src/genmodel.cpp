#include "windplan/genmodel.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "windplan/learning.hpp"

namespace windplan {

std::vector<double> TransitionTensor::column(int prev, int action) const {
  std::vector<double> out(num_states_);
  for (int next = 0; next < num_states_; ++next)
    out[next] = at(next, prev, action);
  return out;
}

void TransitionTensor::validate(double tol) const {
  for (int prev = 0; prev < num_states_; ++prev) {
    for (int action = 0; action < num_actions_; ++action) {
      double sum = 0.0;
      for (int next = 0; next < num_states_; ++next) {
        const double p = at(next, prev, action);
        if (p < 0.0)
          throw std::logic_error("transition tensor has a negative entry");
        sum += p;
      }
      if (std::abs(sum - 1.0) > tol)
        throw std::logic_error("transition tensor column does not sum to 1");
    }
  }
}

int LikelihoodModel::Modality::outcome_index(int value) const {
  auto it = std::lower_bound(alphabet.begin(), alphabet.end(), value);
  if (it == alphabet.end() || *it != value) return -1;
  return static_cast<int>(it - alphabet.begin());
}

LikelihoodModel::LikelihoodModel(int num_states,
                                 std::vector<Modality> modalities)
    : num_states_(num_states), modalities_(std::move(modalities)) {
  if (num_states < 1)
    throw std::invalid_argument("LikelihoodModel needs >= 1 state");
  for (const auto& m : modalities_) {
    if (m.probs.size() !=
        static_cast<std::size_t>(m.num_outcomes()) * num_states_)
      throw std::invalid_argument("modality tensor shape mismatch");
  }
}

double LikelihoodModel::observation_entropy(int state0) const {
  double h = 0.0;
  for (const auto& m : modalities_) {
    for (int o = 0; o < m.num_outcomes(); ++o) {
      const double p = m.at(o, state0, num_states_);
      if (p > 0.0) h -= p * std::log(p);
    }
  }
  return h;
}

void LikelihoodModel::validate(double tol) const {
  for (const auto& m : modalities_) {
    for (int s = 0; s < num_states_; ++s) {
      double sum = 0.0;
      for (int o = 0; o < m.num_outcomes(); ++o) {
        const double p = m.at(o, s, num_states_);
        if (p < 0.0) throw std::logic_error("likelihood has a negative entry");
        sum += p;
      }
      if (std::abs(sum - 1.0) > tol)
        throw std::logic_error("likelihood state column does not sum to 1");
    }
  }
}

int JointOutcomes::index_of(const std::vector<int>& outcome) const {
  auto it = std::lower_bound(alphabet.begin(), alphabet.end(), outcome);
  if (it == alphabet.end() || *it != outcome) return -1;
  return static_cast<int>(it - alphabet.begin());
}

JointOutcomes enumerate_joint_outcomes(const LikelihoodModel& likelihood) {
  const int num_states = likelihood.num_states();
  const int num_modalities = likelihood.num_modalities();

  // Per state, every joint combination with positive probability.
  std::vector<std::vector<std::pair<std::vector<int>, double>>> raw(num_states);
  std::map<std::vector<int>, int> index;
  for (int s = 0; s < num_states; ++s) {
    std::vector<std::pair<std::vector<int>, double>> combos = {{{}, 1.0}};
    for (int m = 0; m < num_modalities; ++m) {
      const auto& modality = likelihood.modality(m);
      std::vector<std::pair<std::vector<int>, double>> grown;
      for (const auto& [prefix, p] : combos) {
        for (int o = 0; o < modality.num_outcomes(); ++o) {
          const double po = modality.at(o, s, num_states);
          if (po <= 0.0) continue;
          auto next = prefix;
          next.push_back(o);
          grown.emplace_back(std::move(next), p * po);
        }
      }
      combos = std::move(grown);
    }
    for (const auto& [combo, p] : combos) index.emplace(combo, 0);
    raw[s] = std::move(combos);
  }

  JointOutcomes joint;
  joint.alphabet.reserve(index.size());
  for (auto& [combo, idx] : index) {
    idx = static_cast<int>(joint.alphabet.size());
    joint.alphabet.push_back(combo);
  }
  joint.per_state.resize(num_states);
  for (int s = 0; s < num_states; ++s) {
    for (const auto& [combo, p] : raw[s])
      joint.per_state[s].emplace_back(index.at(combo), p);
  }
  return joint;
}

PreferenceVector make_preferences_at(int goal0, double epsilon, int n) {
  if (n < 1) throw std::invalid_argument("preference vector needs n >= 1");
  if (goal0 < 0 || goal0 >= n)
    throw std::out_of_range("preference goal outside the vector");
  if (epsilon <= 0.0 || epsilon >= 1.0 / n)
    throw std::invalid_argument("preference epsilon must lie in (0, 1/n)");

  PreferenceVector prefs;
  prefs.epsilon = epsilon;
  prefs.probs.assign(n, epsilon);
  prefs.probs[goal0] = 1.0;
  normalize(prefs.probs);
  return prefs;
}

PreferenceVector make_preferences(StateIndex goal, double epsilon, int n) {
  return make_preferences_at(goal.index0(), epsilon, n);
}

double kl_divergence(std::span<const double> q, std::span<const double> c) {
  if (q.size() != c.size())
    throw std::invalid_argument("kl_divergence length mismatch");
  double kl = 0.0;
  for (std::size_t i = 0; i < q.size(); ++i) {
    if (q[i] <= 0.0) continue;  // 0 ln 0 := 0
    if (c[i] <= 0.0)
      throw std::domain_error("kl_divergence: q has mass where c is zero");
    kl += q[i] * (std::log(q[i]) - std::log(c[i]));
  }
  return std::max(kl, 0.0);
}

double entropy(std::span<const double> p) {
  double h = 0.0;
  for (double x : p)
    if (x > 0.0) h -= x * std::log(x);
  return h;
}

std::vector<double> softmax(std::span<const double> logits) {
  std::vector<double> out(logits.size());
  const double top = *std::max_element(logits.begin(), logits.end());
  double sum = 0.0;
  for (std::size_t i = 0; i < logits.size(); ++i) {
    out[i] = std::exp(logits[i] - top);
    sum += out[i];
  }
  for (double& x : out) x /= sum;
  return out;
}

bool is_distribution(std::span<const double> p, double tol) {
  double sum = 0.0;
  for (double x : p) {
    if (x < 0.0) return false;
    sum += x;
  }
  return std::abs(sum - 1.0) <= tol;
}

void normalize(std::vector<double>& p) {
  double sum = 0.0;
  for (double x : p) sum += x;
  if (sum <= 0.0) throw std::domain_error("cannot normalize zero mass");
  for (double& x : p) x /= sum;
}

int sample_categorical(std::span<const double> probs, Rng& rng, double tol) {
  if (!is_distribution(probs, tol))
    throw std::logic_error("sample_categorical: input is not normalized");
  const double u = rng.uniform_double();
  double acc = 0.0;
  for (std::size_t i = 0; i < probs.size(); ++i) {
    acc += probs[i];
    if (u < acc) return static_cast<int>(i);
  }
  // Round-off can leave acc fractionally below 1; fall back to the last
  // entry with mass.
  for (std::size_t i = probs.size(); i-- > 0;)
    if (probs[i] > 0.0) return static_cast<int>(i);
  return 0;
}

TransitionTensor normalize_counts(const DirichletCounts& counts) {
  TransitionTensor tensor(counts.num_states, counts.num_actions);
  for (int prev = 0; prev < counts.num_states; ++prev) {
    for (int action = 0; action < counts.num_actions; ++action) {
      double sum = 0.0;
      for (int next = 0; next < counts.num_states; ++next)
        sum += counts.at(next, prev, action);
      if (sum <= 0.0)
        throw std::domain_error("normalize_counts: column has zero mass");
      for (int next = 0; next < counts.num_states; ++next)
        tensor.at(next, prev, action) = counts.at(next, prev, action) / sum;
    }
  }
  return tensor;
}

}  // namespace windplan
