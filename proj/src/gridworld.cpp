#include "windplan/gridworld.hpp"

#include <algorithm>
#include <set>

namespace windplan {

std::string to_string(WindStochasticity s) {
  switch (s) {
    case WindStochasticity::Deterministic: return "deterministic";
    case WindStochasticity::Medium: return "medium";
    case WindStochasticity::High: return "high";
  }
  throw std::invalid_argument("unknown stochasticity");
}

WindStochasticity wind_stochasticity_from_string(const std::string& name) {
  if (name == "deterministic") return WindStochasticity::Deterministic;
  if (name == "medium") return WindStochasticity::Medium;
  if (name == "high") return WindStochasticity::High;
  throw std::invalid_argument("unknown stochasticity: " + name);
}

void GridGeometry::validate() const {
  if (rows < 1 || cols < 1)
    throw std::invalid_argument("geometry needs rows >= 1 and cols >= 1");
  if (start.value() > num_states() || goal.value() > num_states())
    throw std::invalid_argument("start/goal outside the grid");
  if (start == goal)
    throw std::invalid_argument("start and goal must differ");
  if (static_cast<int>(wind_profile.size()) != cols)
    throw std::invalid_argument("wind profile length must equal cols");
  for (int w : wind_profile)
    if (w < 0 || w >= rows)
      throw std::invalid_argument("wind amplitudes must lie in [0, rows)");
}

Coords state_to_coords(StateIndex s, const GridGeometry& geometry) {
  if (s.value() > geometry.num_states())
    throw std::out_of_range("state index outside the grid");
  return Coords{.down = s.index0() / geometry.cols + 1,
                .side = s.index0() % geometry.cols + 1};
}

StateIndex coords_to_state(Coords c, const GridGeometry& geometry) {
  if (c.down < 1 || c.down > geometry.rows || c.side < 1 ||
      c.side > geometry.cols)
    throw std::out_of_range("coordinates outside the grid");
  return StateIndex((c.down - 1) * geometry.cols + c.side);
}

ObservationPair observe(StateIndex s, const GridGeometry& geometry) {
  const Coords c = state_to_coords(s, geometry);
  return ObservationPair{.sum = c.down + c.side, .product = c.down * c.side};
}

StateIndex apply_wind_and_move(StateIndex s, Action a, int wind_shift,
                               const GridGeometry& geometry) {
  if (wind_shift < 0)
    throw std::invalid_argument("wind shift must be non-negative");
  const Coords c = state_to_coords(s, geometry);
  const auto& delta = kActionDeltas[static_cast<int>(a)];
  // Move, push upward, then clip once; the intermediate position may leave
  // the grid before clipping.
  int down = c.down + delta[0] - wind_shift;
  int side = c.side + delta[1];
  down = std::clamp(down, 1, geometry.rows);
  side = std::clamp(side, 1, geometry.cols);
  return coords_to_state(Coords{down, side}, geometry);
}

TransitionTensor build_transition_tensor(const GridGeometry& geometry) {
  geometry.validate();
  const int n = geometry.num_states();
  TransitionTensor tensor(n, kNumActions);

  // Wind offset mixture around the column's base amplitude.
  std::vector<std::pair<int, double>> mixture;
  switch (geometry.stochasticity) {
    case WindStochasticity::Deterministic:
      mixture = {{0, 1.0}};
      break;
    case WindStochasticity::Medium:
      mixture = {{-1, 0.15}, {0, 0.70}, {1, 0.15}};
      break;
    case WindStochasticity::High:
      mixture = {{-1, 0.30}, {0, 0.40}, {1, 0.30}};
      break;
  }

  for (int prev = 0; prev < n; ++prev) {
    const StateIndex s(prev + 1);
    const int base_wind =
        geometry.wind_profile[state_to_coords(s, geometry).side - 1];
    for (int action = 0; action < kNumActions; ++action) {
      const Action a = static_cast<Action>(action);
      if (base_wind == 0) {  // calm columns stay deterministic at all levels
        const StateIndex next = apply_wind_and_move(s, a, 0, geometry);
        tensor.at(next.index0(), prev, action) = 1.0;
        continue;
      }
      for (const auto& [offset, p] : mixture) {
        const int wind = std::max(0, base_wind + offset);
        const StateIndex next = apply_wind_and_move(s, a, wind, geometry);
        tensor.at(next.index0(), prev, action) += p;
      }
    }
  }
  return tensor;
}

LikelihoodModel build_likelihood_tensor(const GridGeometry& geometry) {
  geometry.validate();
  const int n = geometry.num_states();

  std::set<int> sums, products;
  for (int i = 0; i < n; ++i) {
    const ObservationPair o = observe(StateIndex(i + 1), geometry);
    sums.insert(o.sum);
    products.insert(o.product);
  }

  auto make_modality = [&](const std::set<int>& values, auto&& outcome_of) {
    LikelihoodModel::Modality m;
    m.alphabet.assign(values.begin(), values.end());
    m.probs.assign(static_cast<std::size_t>(m.alphabet.size()) * n, 0.0);
    for (int i = 0; i < n; ++i) {
      const int idx = m.outcome_index(outcome_of(StateIndex(i + 1)));
      m.probs[static_cast<std::size_t>(idx) * n + i] = 1.0;
    }
    return m;
  };

  std::vector<LikelihoodModel::Modality> modalities;
  modalities.push_back(make_modality(
      sums, [&](StateIndex s) { return observe(s, geometry).sum; }));
  modalities.push_back(make_modality(
      products, [&](StateIndex s) { return observe(s, geometry).product; }));
  return LikelihoodModel(n, std::move(modalities));
}

StateIndex step(StateIndex s, Action a, const TransitionTensor& tensor,
                Rng& rng) {
  if (s.value() > tensor.num_states())
    throw std::out_of_range("state index outside the tensor");
  const std::vector<double> column =
      tensor.column(s.index0(), static_cast<int>(a));
  return StateIndex(sample_categorical(column, rng) + 1);
}

Environment make_environment(const GridGeometry& geometry) {
  return Environment{geometry, build_transition_tensor(geometry)};
}

}  // namespace windplan
