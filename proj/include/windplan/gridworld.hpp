#pragma once

#include <array>
#include <string>
#include <vector>

#include "windplan/genmodel.hpp"
#include "windplan/rng.hpp"

namespace windplan {

/// King's moves, fixed ordinal encoding 0..7.
enum class Action : int {
  North = 0,
  South = 1,
  East = 2,
  West = 3,
  NorthWest = 4,
  SouthWest = 5,
  SouthEast = 6,
  NorthEast = 7,
};

inline constexpr int kNumActions = 8;
inline constexpr std::array<const char*, kNumActions> kActionNames = {
    "N", "S", "E", "W", "NW", "SW", "SE", "NE"};

/// (delta_down, delta_side) per action, in the order above.
inline constexpr std::array<std::array<int, 2>, kNumActions> kActionDeltas = {{
    {-1, 0}, {1, 0}, {0, 1}, {0, -1}, {-1, -1}, {1, -1}, {1, 1}, {-1, 1},
}};

enum class WindStochasticity { Deterministic, Medium, High };

std::string to_string(WindStochasticity s);
WindStochasticity wind_stochasticity_from_string(const std::string& name);

/// Grid coordinates: down counts rows from the top (1-based), side counts
/// columns from the left (1-based). State 1 is (1,1), state 11 is (2,1).
struct Coords {
  int down = 1;
  int side = 1;
  auto operator<=>(const Coords&) const = default;
};

/// Two-modality observation of a state: the sum and the product of its
/// coordinates. Many states share one pair.
struct ObservationPair {
  int sum = 0;
  int product = 0;
  auto operator<=>(const ObservationPair&) const = default;
};

struct GridGeometry {
  int rows = 7;
  int cols = 10;
  StateIndex start{31};  // (down 4, side 1)
  StateIndex goal{38};   // (down 4, side 8)
  /// Base upward wind amplitude per column; classic profile by default.
  std::vector<int> wind_profile = {0, 0, 0, 1, 1, 1, 2, 2, 1, 0};
  WindStochasticity stochasticity = WindStochasticity::Deterministic;

  int num_states() const { return rows * cols; }

  /// Throws std::invalid_argument on inconsistent fields.
  void validate() const;
};

Coords state_to_coords(StateIndex s, const GridGeometry& geometry);
StateIndex coords_to_state(Coords c, const GridGeometry& geometry);
ObservationPair observe(StateIndex s, const GridGeometry& geometry);

/// Applies the intended King's move, then shifts the down-coordinate up by
/// wind_shift rows, then clips both coordinates to the grid. The wind shift
/// is the caller's responsibility and is read from the origin column of s.
StateIndex apply_wind_and_move(StateIndex s, Action a, int wind_shift,
                               const GridGeometry& geometry);

/// Ground-truth dynamics for the geometry's stochasticity setting. Windy
/// columns mix wind values {w-1, w, w+1} with weights 0.15/0.70/0.15
/// (medium) or 0.30/0.40/0.30 (high); zero-wind columns stay deterministic.
TransitionTensor build_transition_tensor(const GridGeometry& geometry);

/// Deterministic two-modality observation map in tensor form. Modality 0 is
/// the coordinate sum, modality 1 the coordinate product; each alphabet is
/// the set of distinct values realized on the grid.
LikelihoodModel build_likelihood_tensor(const GridGeometry& geometry);

/// Samples the next state from the (s, a) column of the tensor.
StateIndex step(StateIndex s, Action a, const TransitionTensor& tensor,
                Rng& rng);

/// A simulatable ground-truth environment: geometry plus true dynamics.
struct Environment {
  GridGeometry geometry;
  TransitionTensor transitions;

  StateIndex step(StateIndex s, Action a, Rng& rng) const {
    return windplan::step(s, a, transitions, rng);
  }
};

Environment make_environment(const GridGeometry& geometry);

}  // namespace windplan
