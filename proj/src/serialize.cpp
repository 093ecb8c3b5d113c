#include "windplan/serialize.hpp"

#include <fstream>

namespace windplan {

nlohmann::json to_json(const GridGeometry& geometry) {
  return nlohmann::json{{"rows", geometry.rows},
                        {"cols", geometry.cols},
                        {"start", geometry.start.value()},
                        {"goal", geometry.goal.value()},
                        {"wind_profile", geometry.wind_profile},
                        {"stochasticity", to_string(geometry.stochasticity)}};
}

GridGeometry geometry_from_json(const nlohmann::json& j) {
  GridGeometry geometry;
  geometry.rows = j.at("rows").get<int>();
  geometry.cols = j.at("cols").get<int>();
  geometry.start = StateIndex(j.at("start").get<int>());
  geometry.goal = StateIndex(j.at("goal").get<int>());
  geometry.wind_profile = j.at("wind_profile").get<std::vector<int>>();
  geometry.stochasticity =
      wind_stochasticity_from_string(j.at("stochasticity").get<std::string>());
  geometry.validate();
  return geometry;
}

nlohmann::json to_json(const TransitionTensor& tensor) {
  return nlohmann::json{
      {"shape",
       {tensor.num_states(), tensor.num_states(), tensor.num_actions()}},
      {"data", tensor.data()}};
}

TransitionTensor tensor_from_json(const nlohmann::json& j) {
  const auto shape = j.at("shape").get<std::vector<int>>();
  if (shape.size() != 3 || shape[0] != shape[1])
    throw std::invalid_argument("tensor shape must be [n, n, actions]");
  TransitionTensor tensor(shape[0], shape[2]);
  tensor.data() = j.at("data").get<std::vector<double>>();
  if (tensor.data().size() !=
      static_cast<std::size_t>(shape[0]) * shape[1] * shape[2])
    throw std::invalid_argument("tensor data length does not match shape");
  return tensor;
}

nlohmann::json to_json(const DirichletCounts& counts) {
  return nlohmann::json{
      {"shape", {counts.num_states, counts.num_states, counts.num_actions}},
      {"data", counts.counts},
      {"alpha", counts.alpha},
      {"steps", counts.steps}};
}

DirichletCounts counts_from_json(const nlohmann::json& j) {
  const auto shape = j.at("shape").get<std::vector<int>>();
  if (shape.size() != 3 || shape[0] != shape[1])
    throw std::invalid_argument("counts shape must be [n, n, actions]");
  DirichletCounts counts(shape[0], shape[2], j.at("alpha").get<double>());
  counts.counts = j.at("data").get<std::vector<double>>();
  counts.steps = j.at("steps").get<std::uint64_t>();
  if (counts.counts.size() !=
      static_cast<std::size_t>(shape[0]) * shape[1] * shape[2])
    throw std::invalid_argument("counts data length does not match shape");
  return counts;
}

nlohmann::json to_json(const QTable& table) {
  return nlohmann::json{{"shape", {table.num_obs, table.num_actions}},
                        {"data", table.values}};
}

QTable qtable_from_json(const nlohmann::json& j) {
  const auto shape = j.at("shape").get<std::vector<int>>();
  if (shape.size() != 2)
    throw std::invalid_argument("qtable shape must be [obs, actions]");
  QTable table(shape[0], shape[1]);
  table.values = j.at("data").get<std::vector<double>>();
  if (table.values.size() != static_cast<std::size_t>(shape[0]) * shape[1])
    throw std::invalid_argument("qtable data length does not match shape");
  return table;
}

nlohmann::json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  nlohmann::json j;
  in >> j;
  return j;
}

void save_json_file(const nlohmann::json& j, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  out << j.dump(2) << '\n';
}

}  // namespace windplan
