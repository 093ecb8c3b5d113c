#pragma once

#include <string>

#include <json.hpp>

#include "windplan/genmodel.hpp"
#include "windplan/gridworld.hpp"
#include "windplan/learning.hpp"
#include "windplan/qlearn.hpp"

namespace windplan {

/// Geometry document: {rows, cols, start, goal, wind_profile, stochasticity}.
nlohmann::json to_json(const GridGeometry& geometry);
GridGeometry geometry_from_json(const nlohmann::json& j);

/// Tensor document: {shape: [next, prev, action], data: row-major flat}.
nlohmann::json to_json(const TransitionTensor& tensor);
TransitionTensor tensor_from_json(const nlohmann::json& j);

/// Counts use the tensor layout plus an {alpha, steps} header.
nlohmann::json to_json(const DirichletCounts& counts);
DirichletCounts counts_from_json(const nlohmann::json& j);

/// QTable document: {shape: [obs, action], data: row-major flat}.
nlohmann::json to_json(const QTable& table);
QTable qtable_from_json(const nlohmann::json& j);

nlohmann::json load_json_file(const std::string& path);
void save_json_file(const nlohmann::json& j, const std::string& path);

}  // namespace windplan
