#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <fstream>
#include <sstream>

#include "windplan/harness.hpp"
#include "windplan/learning.hpp"
#include "windplan/planner_mdp.hpp"
#include "windplan/planner_pomdp.hpp"
#include "windplan/qlearn.hpp"
#include "windplan/serialize.hpp"

namespace py = pybind11;
using namespace windplan;

PYBIND11_MODULE(windplan, m) {
  m.doc() =
      "Expected-free-energy planning, Dirichlet transition learning and "
      "tabular Q-learning baselines on the stochastic windy grid-world.";

  py::register_exception<InferenceError>(m, "InferenceError");
  py::register_exception<ConfigError>(m, "ConfigError");

  py::class_<Rng>(m, "Rng")
      .def(py::init<std::uint64_t>(), py::arg("seed") = 0)
      .def("uniform_double", &Rng::uniform_double)
      .def("uniform_int", &Rng::uniform_int);

  py::class_<StateIndex>(m, "StateIndex")
      .def(py::init<int>())
      .def_property_readonly("value", &StateIndex::value)
      .def("__int__", &StateIndex::value)
      .def("__eq__",
           [](const StateIndex& a, const StateIndex& b) { return a == b; })
      .def("__repr__", [](const StateIndex& s) {
        return "StateIndex(" + std::to_string(s.value()) + ")";
      });
  py::implicitly_convertible<py::int_, StateIndex>();

  py::enum_<Action>(m, "Action")
      .value("N", Action::North)
      .value("S", Action::South)
      .value("E", Action::East)
      .value("W", Action::West)
      .value("NW", Action::NorthWest)
      .value("SW", Action::SouthWest)
      .value("SE", Action::SouthEast)
      .value("NE", Action::NorthEast);

  py::enum_<WindStochasticity>(m, "WindStochasticity")
      .value("Deterministic", WindStochasticity::Deterministic)
      .value("Medium", WindStochasticity::Medium)
      .value("High", WindStochasticity::High);

  py::class_<Coords>(m, "Coords")
      .def_readonly("down", &Coords::down)
      .def_readonly("side", &Coords::side)
      .def("__repr__", [](const Coords& c) {
        return "Coords(down=" + std::to_string(c.down) +
               ", side=" + std::to_string(c.side) + ")";
      });

  py::class_<ObservationPair>(m, "ObservationPair")
      .def_readonly("sum", &ObservationPair::sum)
      .def_readonly("product", &ObservationPair::product)
      .def("__repr__", [](const ObservationPair& o) {
        return "ObservationPair(sum=" + std::to_string(o.sum) +
               ", product=" + std::to_string(o.product) + ")";
      });

  py::class_<GridGeometry>(m, "GridGeometry")
      .def(py::init<>())
      .def_readwrite("rows", &GridGeometry::rows)
      .def_readwrite("cols", &GridGeometry::cols)
      .def_readwrite("start", &GridGeometry::start)
      .def_readwrite("goal", &GridGeometry::goal)
      .def_readwrite("wind_profile", &GridGeometry::wind_profile)
      .def_readwrite("stochasticity", &GridGeometry::stochasticity)
      .def("num_states", &GridGeometry::num_states)
      .def("validate", &GridGeometry::validate)
      .def("to_json", [](const GridGeometry& g) { return to_json(g).dump(); });

  m.def("geometry_from_json", [](const std::string& text) {
    return geometry_from_json(nlohmann::json::parse(text));
  });

  py::class_<TransitionTensor>(m, "TransitionTensor")
      .def(py::init<int, int, double>(), py::arg("num_states"),
           py::arg("num_actions"), py::arg("fill") = 0.0)
      .def("num_states", &TransitionTensor::num_states)
      .def("num_actions", &TransitionTensor::num_actions)
      .def("at",
           [](const TransitionTensor& t, int next, int prev, int action) {
             return t.at(next, prev, action);
           })
      .def("set",
           [](TransitionTensor& t, int next, int prev, int action, double p) {
             t.at(next, prev, action) = p;
           })
      .def("column", &TransitionTensor::column)
      .def("validate", &TransitionTensor::validate, py::arg("tol") = 1e-9)
      .def("data", [](const TransitionTensor& t) { return t.data(); })
      .def("to_json", [](const TransitionTensor& t) { return to_json(t).dump(); });

  m.def("tensor_from_json", [](const std::string& text) {
    return tensor_from_json(nlohmann::json::parse(text));
  });

  py::class_<LikelihoodModel>(m, "LikelihoodModel")
      .def("num_states", &LikelihoodModel::num_states)
      .def("num_modalities", &LikelihoodModel::num_modalities)
      .def("alphabet",
           [](const LikelihoodModel& a, int m) {
             return a.modality(m).alphabet;
           })
      .def("at", &LikelihoodModel::at)
      .def("observation_entropy", &LikelihoodModel::observation_entropy);

  py::class_<JointOutcomes>(m, "JointOutcomes")
      .def_readonly("alphabet", &JointOutcomes::alphabet)
      .def_readonly("per_state", &JointOutcomes::per_state)
      .def("size", &JointOutcomes::size)
      .def("index_of", &JointOutcomes::index_of);
  m.def("enumerate_joint_outcomes", &enumerate_joint_outcomes);

  py::class_<Environment>(m, "Environment")
      .def_readonly("geometry", &Environment::geometry)
      .def_readonly("transitions", &Environment::transitions)
      .def("step", &Environment::step);

  m.def("state_to_coords", &state_to_coords);
  m.def("coords_to_state",
        [](int down, int side, const GridGeometry& g) {
          return coords_to_state(Coords{down, side}, g);
        });
  m.def("observe", &observe);
  m.def("apply_wind_and_move", &apply_wind_and_move);
  m.def("build_transition_tensor", &build_transition_tensor);
  m.def("build_likelihood_tensor", &build_likelihood_tensor);
  m.def("make_environment", &make_environment);
  m.def("step", &step);

  py::class_<PreferenceVector>(m, "PreferenceVector")
      .def_readonly("probs", &PreferenceVector::probs)
      .def_readonly("epsilon", &PreferenceVector::epsilon);
  m.def("make_preferences", &make_preferences, py::arg("goal"),
        py::arg("epsilon"), py::arg("n"));
  m.def("kl_divergence", [](const std::vector<double>& q,
                            const std::vector<double>& c) {
    return kl_divergence(q, c);
  });
  m.def("entropy",
        [](const std::vector<double>& p) { return entropy(p); });
  m.def("softmax",
        [](const std::vector<double>& logits) { return softmax(logits); });

  py::class_<EpisodeResult>(m, "EpisodeResult")
      .def_property_readonly("trajectory",
                             [](const EpisodeResult& r) {
                               std::vector<int> out;
                               for (auto s : r.trajectory)
                                 out.push_back(s.value());
                               return out;
                             })
      .def_readonly("actions", &EpisodeResult::actions)
      .def_readonly("reached_goal", &EpisodeResult::reached_goal)
      .def_readonly("steps_used", &EpisodeResult::steps_used);

  py::class_<MdpModel>(m, "MdpModel")
      .def(py::init([](TransitionTensor transitions, PreferenceVector prefs,
                       StateIndex goal) {
             return MdpModel{std::move(transitions), std::move(prefs), goal};
           }),
           py::arg("transitions"), py::arg("preferences"), py::arg("goal"));

  py::class_<EfePlanner>(m, "EfePlanner")
      .def(py::init<MdpModel, int>(), py::arg("model"), py::arg("horizon"))
      .def("horizon", &EfePlanner::horizon)
      .def("efe", &EfePlanner::efe, py::arg("s"), py::arg("action"),
           py::arg("tau"))
      .def("efe_values",
           [](const EfePlanner& p, StateIndex s, int tau) {
             auto values = p.efe_values(s, tau);
             return std::vector<double>(values.begin(), values.end());
           })
      .def("action_distribution",
           [](const EfePlanner& p, StateIndex s, int tau) {
             auto values = p.action_distribution(s, tau);
             return std::vector<double>(values.begin(), values.end());
           })
      .def("table_size", &EfePlanner::table_size);

  m.def("sample_action",
        [](const std::vector<double>& dist, Rng& rng) {
          return sample_action(dist, rng);
        });
  m.def("run_episode", &run_episode);

  py::class_<PruningConfig>(m, "PruningConfig")
      .def(py::init<>())
      .def_readwrite("outcome_threshold", &PruningConfig::outcome_threshold)
      .def_readwrite("action_threshold", &PruningConfig::action_threshold);

  py::class_<PomdpModel>(m, "PomdpModel")
      .def(py::init([](TransitionTensor transitions, LikelihoodModel likelihood,
                       StateIndex goal, double epsilon) {
             return PomdpModel{std::move(transitions), std::move(likelihood),
                               goal, epsilon};
           }),
           py::arg("transitions"), py::arg("likelihood"), py::arg("goal"),
           py::arg("preference_epsilon") = 1e-12);

  py::class_<TreeStats>(m, "TreeStats")
      .def_readonly("node_visits", &TreeStats::node_visits)
      .def_readonly("nodes_expanded", &TreeStats::nodes_expanded)
      .def_readonly("obs_branches_kept", &TreeStats::obs_branches_kept)
      .def_readonly("obs_branches_total", &TreeStats::obs_branches_total);

  py::class_<BeliefPlanner>(m, "BeliefPlanner")
      .def(py::init<PomdpModel, int, PruningConfig>(), py::arg("model"),
           py::arg("horizon"), py::arg("pruning") = PruningConfig{})
      .def("horizon", &BeliefPlanner::horizon)
      .def("efe_belief", &BeliefPlanner::efe_belief)
      .def("efe_values", &BeliefPlanner::efe_values)
      .def("action_probabilities", &BeliefPlanner::action_probabilities)
      .def("predict_outcomes", &BeliefPlanner::predict_outcomes)
      .def("outcome_preferences", &BeliefPlanner::outcome_preferences)
      .def("stats", &BeliefPlanner::stats)
      .def("reset_stats", &BeliefPlanner::reset_stats)
      .def("memo_size", &BeliefPlanner::memo_size);

  m.def("belief_predict", &belief_predict);
  m.def("belief_update",
        [](const BeliefState& b, const std::vector<int>& values,
           const LikelihoodModel& a) { return belief_update(b, values, a); });
  m.def("belief_update_pair",
        [](const BeliefState& b, ObservationPair o, const LikelihoodModel& a) {
          return belief_update(b, o, a);
        });
  m.def(
      "run_episode_pomdp",
      [](BeliefPlanner& planner, const Environment& env, Rng& rng,
         bool uniform_initial_belief, const std::string& trace_path) {
        PomdpEpisodeOptions options;
        options.initial_belief = uniform_initial_belief
                                     ? InitialBelief::Uniform
                                     : InitialBelief::StartPointMass;
        std::ofstream trace;
        if (!trace_path.empty()) {
          trace.open(trace_path, std::ios::app);
          options.trace = &trace;
        }
        return run_episode_pomdp(planner, env, rng, options);
      },
      py::arg("planner"), py::arg("env"), py::arg("rng"),
      py::arg("uniform_initial_belief") = false, py::arg("trace_path") = "");

  py::class_<DirichletCounts>(m, "DirichletCounts")
      .def(py::init<int, int, double>(), py::arg("num_states"),
           py::arg("num_actions"), py::arg("alpha") = 1.0)
      .def_readonly("num_states", &DirichletCounts::num_states)
      .def_readonly("num_actions", &DirichletCounts::num_actions)
      .def_readonly("alpha", &DirichletCounts::alpha)
      .def_readonly("steps", &DirichletCounts::steps)
      .def("at",
           [](const DirichletCounts& c, int next, int prev, int action) {
             return c.at(next, prev, action);
           })
      .def("total", &DirichletCounts::total)
      .def("to_json", [](const DirichletCounts& c) { return to_json(c).dump(); });

  m.def("update_counts", &update_counts, py::arg("counts"), py::arg("prev"),
        py::arg("action"), py::arg("next"), py::arg("weight") = 1.0);
  m.def("explore_random", &explore_random, py::arg("env"), py::arg("steps"),
        py::arg("rng"), py::arg("alpha") = 1.0,
        py::arg("max_episode_moves") = 0);
  m.def("normalize_counts", &normalize_counts);
  m.def("model_accuracy", &model_accuracy);

  py::class_<QTable>(m, "QTable")
      .def(py::init<int, int>(), py::arg("num_obs"), py::arg("num_actions"))
      .def_readonly("num_obs", &QTable::num_obs)
      .def_readonly("num_actions", &QTable::num_actions)
      .def_readwrite("values", &QTable::values)
      .def("at", [](const QTable& t, int obs, int a) { return t.at(obs, a); })
      .def("set",
           [](QTable& t, int obs, int a, double v) { t.at(obs, a) = v; })
      .def("greedy_action", &QTable::greedy_action);

  py::class_<QTrainConfig>(m, "QTrainConfig")
      .def(py::init<>())
      .def_readwrite("steps", &QTrainConfig::steps)
      .def_readwrite("max_episode_moves", &QTrainConfig::max_episode_moves)
      .def_readwrite("exploration_rate", &QTrainConfig::exploration_rate)
      .def_readwrite("learning_rate", &QTrainConfig::learning_rate)
      .def_readwrite("discount", &QTrainConfig::discount)
      .def_readwrite("indexer", &QTrainConfig::indexer)
      .def_readwrite("num_obs", &QTrainConfig::num_obs);

  m.def("train", &train);
  m.def("greedy_episode", &greedy_episode, py::arg("table"), py::arg("env"),
        py::arg("horizon"), py::arg("rng"), py::arg("eval_exploration") = 0.0,
        py::arg("indexer") = ObservationIndexer{});

  py::enum_<AgentKind>(m, "AgentKind")
      .value("Sophisticated", AgentKind::Sophisticated)
      .value("SophLearnedB", AgentKind::SophLearnedB)
      .value("QLearning", AgentKind::QLearning)
      .value("Random", AgentKind::Random);

  py::enum_<OutputFormat>(m, "OutputFormat")
      .value("Csv", OutputFormat::Csv)
      .value("Json", OutputFormat::Json);

  py::class_<BenchmarkConfig>(m, "BenchmarkConfig")
      .def(py::init<>())
      .def_readwrite("level", &BenchmarkConfig::level)
      .def_readwrite("stochasticity", &BenchmarkConfig::stochasticity)
      .def_readwrite("agent", &BenchmarkConfig::agent)
      .def_readwrite("agent_steps", &BenchmarkConfig::agent_steps)
      .def_readwrite("horizons", &BenchmarkConfig::horizons)
      .def_readwrite("trials_per_point", &BenchmarkConfig::trials_per_point)
      .def_readwrite("seeds", &BenchmarkConfig::seeds)
      .def_readwrite("geometry", &BenchmarkConfig::geometry)
      .def_readwrite("preference_epsilon",
                     &BenchmarkConfig::preference_epsilon)
      .def_readwrite("alpha_prior", &BenchmarkConfig::alpha_prior)
      .def_readwrite("pruning", &BenchmarkConfig::pruning)
      .def_readwrite("base_seed", &BenchmarkConfig::base_seed)
      .def_readwrite("workers", &BenchmarkConfig::workers)
      .def_readwrite("allow_long_horizons",
                     &BenchmarkConfig::allow_long_horizons)
      .def("agent_label", &BenchmarkConfig::agent_label)
      .def("validate", &BenchmarkConfig::validate);

  py::class_<ResultRow>(m, "ResultRow")
      .def_readonly("agent", &ResultRow::agent)
      .def_readonly("level", &ResultRow::level)
      .def_readonly("stochasticity", &ResultRow::stochasticity)
      .def_readonly("horizon", &ResultRow::horizon)
      .def_readonly("seed", &ResultRow::seed)
      .def_readonly("trials", &ResultRow::trials)
      .def_readonly("successes", &ResultRow::successes)
      .def_readonly("success_rate", &ResultRow::success_rate)
      .def_readonly("mean_steps_on_success", &ResultRow::mean_steps_on_success)
      .def_readonly("planning_wall_time_ms", &ResultRow::planning_wall_time_ms);

  m.def("run_benchmark", &run_benchmark,
        py::call_guard<py::gil_scoped_release>());
  m.def("results_to_csv", &results_to_csv);
  m.def("emit_results", &emit_results);
  m.def("parse_horizons", &parse_horizons);
}
