#include "windplan/harness.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>

#include "windplan/learning.hpp"
#include "windplan/planner_mdp.hpp"
#include "windplan/qlearn.hpp"

namespace windplan {

namespace {

// Stream purposes hashed into per-cell seeds.
enum SeedTag : std::uint64_t { kTagLearn = 1, kTagTrain = 2, kTagTrial = 3 };

double round_to(double x, double scale) { return std::round(x * scale) / scale; }

int resolve_workers(const BenchmarkConfig& config, std::size_t cells) {
  int workers = config.workers;
  if (workers <= 0) {
    if (const char* env = std::getenv("WINDPLAN_WORKERS")) {
      workers = std::atoi(env);
    }
  }
  if (workers <= 0)
    workers = static_cast<int>(std::thread::hardware_concurrency());
  if (workers <= 0) workers = 1;
  return static_cast<int>(
      std::min<std::size_t>(static_cast<std::size_t>(workers), cells));
}

}  // namespace

std::string to_string(AgentKind agent) {
  switch (agent) {
    case AgentKind::Sophisticated: return "sophisticated";
    case AgentKind::SophLearnedB: return "soph-learned-b";
    case AgentKind::QLearning: return "qlearning";
    case AgentKind::Random: return "random";
  }
  throw std::invalid_argument("unknown agent kind");
}

AgentKind agent_kind_from_string(const std::string& name) {
  if (name == "sophisticated") return AgentKind::Sophisticated;
  if (name == "soph-learned-b") return AgentKind::SophLearnedB;
  if (name == "qlearning") return AgentKind::QLearning;
  if (name == "random") return AgentKind::Random;
  throw ConfigError("unknown agent: " + name);
}

std::string BenchmarkConfig::agent_label() const {
  switch (agent) {
    case AgentKind::Sophisticated: return "sophisticated";
    case AgentKind::SophLearnedB:
      return "soph-learned-b-" + std::to_string(agent_steps);
    case AgentKind::QLearning:
      return "qlearning-" + std::to_string(agent_steps);
    case AgentKind::Random: return "random";
  }
  throw std::invalid_argument("unknown agent kind");
}

void BenchmarkConfig::validate() const {
  if (level < 1 || level > 5) throw ConfigError("level must lie in 1..5");
  if (horizons.empty()) throw ConfigError("at least one horizon required");
  for (int h : horizons)
    if (h < 1) throw ConfigError("horizons must be >= 1");
  if (trials_per_point < 1) throw ConfigError("trials must be >= 1");
  if (seeds < 1) throw ConfigError("seeds must be >= 1");

  const bool deterministic_level = level == 1 || level == 3;
  if (deterministic_level &&
      stochasticity != WindStochasticity::Deterministic)
    throw ConfigError("levels 1 and 3 use deterministic wind");
  if (!deterministic_level &&
      stochasticity == WindStochasticity::Deterministic)
    throw ConfigError("levels 2, 4 and 5 need medium or high stochasticity");

  switch (agent) {
    case AgentKind::Sophisticated:
      if (level == 3 || level == 4)
        throw ConfigError(
            "levels 3 and 4 have learned dynamics; use soph-learned-b");
      break;
    case AgentKind::SophLearnedB:
      if (level != 3 && level != 4)
        throw ConfigError("soph-learned-b applies to levels 3 and 4 only");
      break;
    case AgentKind::QLearning:
    case AgentKind::Random:
      break;
  }

  if (level == 5 && !allow_long_horizons) {
    for (int h : horizons)
      if (h > 12)
        throw ConfigError(
            "level-5 horizons are capped at 12; pass --allow-long-horizons "
            "to override");
  }

  try {
    geometry.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("bad geometry: ") + e.what());
  }
  if (preference_epsilon <= 0.0 ||
      preference_epsilon >= 1.0 / geometry.num_states())
    throw ConfigError("preference epsilon must lie in (0, 1/num_states)");
  if (pruning.outcome_threshold < 0.0 || pruning.outcome_threshold >= 1.0 ||
      pruning.action_threshold < 0.0 || pruning.action_threshold >= 1.0)
    throw ConfigError("pruning thresholds must lie in [0, 1)");
  if (alpha_prior < 0.0)
    throw ConfigError("alpha prior must be positive (or 0 for 1/num_states)");
}

namespace {

ResultRow run_cell(const BenchmarkConfig& config, int horizon,
                   int seed_index) {
  const auto t_begin = std::chrono::steady_clock::now();

  GridGeometry geometry = config.geometry;
  geometry.stochasticity = config.stochasticity;
  const Environment env = make_environment(geometry);
  const int n = geometry.num_states();
  const int episode_cap = std::max(1, horizon - 1);

  const std::uint64_t cell_seed =
      derive_seed(config.base_seed, config.level, horizon, seed_index);

  int successes = 0;
  double steps_on_success = 0.0;

  const auto record = [&](const EpisodeResult& episode) {
    if (episode.reached_goal) {
      successes += 1;
      steps_on_success += episode.steps_used;
    }
  };
  const auto trial_rng = [&](int trial) {
    return Rng(derive_seed(cell_seed, kTagTrial, trial));
  };

  switch (config.agent) {
    case AgentKind::Sophisticated: {
      if (config.level == 5) {
        PomdpModel model{env.transitions, build_likelihood_tensor(geometry),
                         geometry.goal, config.preference_epsilon};
        BeliefPlanner planner(std::move(model), horizon, config.pruning);
        for (int trial = 0; trial < config.trials_per_point; ++trial) {
          Rng rng = trial_rng(trial);
          record(run_episode_pomdp(planner, env, rng));
        }
      } else {
        MdpModel model{env.transitions,
                       make_preferences(geometry.goal,
                                        config.preference_epsilon, n),
                       geometry.goal};
        const EfePlanner planner(std::move(model), horizon);
        for (int trial = 0; trial < config.trials_per_point; ++trial) {
          Rng rng = trial_rng(trial);
          record(run_episode(planner, env, rng));
        }
      }
      break;
    }
    case AgentKind::SophLearnedB: {
      Rng learn_rng(derive_seed(cell_seed, kTagLearn));
      const double alpha =
          config.alpha_prior > 0.0 ? config.alpha_prior : 1.0 / n;
      // Exploration runs free between goal visits; start-anchored capped
      // bursts barely reach the goal half of the grid.
      const DirichletCounts counts =
          explore_random(env, config.agent_steps, learn_rng, alpha, 0);
      MdpModel model{normalize_counts(counts),
                     make_preferences(geometry.goal, config.preference_epsilon,
                                      n),
                     geometry.goal};
      const EfePlanner planner(std::move(model), horizon);
      for (int trial = 0; trial < config.trials_per_point; ++trial) {
        Rng rng = trial_rng(trial);
        record(run_episode(planner, env, rng));
      }
      break;
    }
    case AgentKind::QLearning: {
      QTrainConfig train_config;
      train_config.steps = config.agent_steps;
      train_config.max_episode_moves = episode_cap;
      JointOutcomes joint;
      if (config.level == 5) {
        // Partial observability: the tabular learner sees the joint
        // observation-pair index, not the state.
        joint = enumerate_joint_outcomes(build_likelihood_tensor(geometry));
        train_config.num_obs = joint.size();
        train_config.indexer = [&joint](StateIndex s) {
          return joint.per_state[s.index0()].front().first;
        };
      }
      Rng train_rng(derive_seed(cell_seed, kTagTrain));
      const QTable table = train(env, train_config, train_rng);
      for (int trial = 0; trial < config.trials_per_point; ++trial) {
        Rng rng = trial_rng(trial);
        record(greedy_episode(table, env, horizon, rng, 0.0,
                              train_config.indexer));
      }
      break;
    }
    case AgentKind::Random: {
      for (int trial = 0; trial < config.trials_per_point; ++trial) {
        Rng rng = trial_rng(trial);
        EpisodeResult episode;
        StateIndex s = geometry.start;
        episode.trajectory.push_back(s);
        episode.reached_goal = s == geometry.goal;
        for (int tau = 1; tau <= horizon - 1 && !episode.reached_goal;
             ++tau) {
          const Action a = static_cast<Action>(rng.uniform_int(kNumActions));
          s = env.step(s, a, rng);
          episode.steps_used += 1;
          episode.reached_goal = s == geometry.goal;
        }
        record(episode);
      }
      break;
    }
  }

  const auto t_end = std::chrono::steady_clock::now();
  ResultRow row;
  row.agent = config.agent_label();
  row.level = config.level;
  row.stochasticity = to_string(config.stochasticity);
  row.horizon = horizon;
  row.seed = seed_index;
  row.trials = config.trials_per_point;
  row.successes = successes;
  row.success_rate = round_to(
      static_cast<double>(successes) / config.trials_per_point, 1e4);
  row.mean_steps_on_success =
      successes > 0 ? round_to(steps_on_success / successes, 1e4) : 0.0;
  row.planning_wall_time_ms = round_to(
      std::chrono::duration<double, std::milli>(t_end - t_begin).count(), 1e3);
  return row;
}

}  // namespace

std::vector<ResultRow> run_benchmark(const BenchmarkConfig& config) {
  config.validate();

  struct Cell {
    int horizon;
    int seed_index;
  };
  std::vector<Cell> cells;
  cells.reserve(config.horizons.size() * config.seeds);
  for (int horizon : config.horizons)
    for (int seed = 0; seed < config.seeds; ++seed)
      cells.push_back({horizon, seed});

  std::vector<ResultRow> rows(cells.size());
  const int workers = resolve_workers(config, cells.size());

  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;

  const auto worker = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= cells.size()) return;
      try {
        rows[i] = run_cell(config, cells[i].horizon, cells[i].seed_index);
      } catch (...) {
        std::lock_guard<std::mutex> lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        return;
      }
    }
  };

  if (workers <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (int i = 0; i < workers; ++i) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  if (failure) std::rethrow_exception(failure);
  return rows;
}

namespace {

constexpr const char* kCsvHeader =
    "agent,level,stochasticity,horizon,seed,trials,successes,success_rate,"
    "mean_steps_on_success,planning_wall_time_ms";

}  // namespace

std::string results_to_csv(const std::vector<ResultRow>& rows) {
  std::string out = kCsvHeader;
  out.push_back('\n');
  char buffer[256];
  for (const auto& row : rows) {
    std::snprintf(buffer, sizeof(buffer), "%s,%d,%s,%d,%d,%d,%d,%.4f,%.4f,%.3f",
                  row.agent.c_str(), row.level, row.stochasticity.c_str(),
                  row.horizon, row.seed, row.trials, row.successes,
                  row.success_rate, row.mean_steps_on_success,
                  row.planning_wall_time_ms);
    out += buffer;
    out.push_back('\n');
  }
  return out;
}

nlohmann::json results_to_json(const std::vector<ResultRow>& rows) {
  nlohmann::json out = nlohmann::json::array();
  for (const auto& row : rows) {
    out.push_back({{"agent", row.agent},
                   {"level", row.level},
                   {"stochasticity", row.stochasticity},
                   {"horizon", row.horizon},
                   {"seed", row.seed},
                   {"trials", row.trials},
                   {"successes", row.successes},
                   {"success_rate", row.success_rate},
                   {"mean_steps_on_success", row.mean_steps_on_success},
                   {"planning_wall_time_ms", row.planning_wall_time_ms}});
  }
  return out;
}

std::vector<ResultRow> results_from_csv(const std::string& csv) {
  std::istringstream in(csv);
  std::string line;
  if (!std::getline(in, line) || line != kCsvHeader)
    throw std::invalid_argument("unexpected CSV header");

  std::vector<ResultRow> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream fields(line);
    std::string field;
    std::vector<std::string> parts;
    while (std::getline(fields, field, ',')) parts.push_back(field);
    if (parts.size() != 10)
      throw std::invalid_argument("CSV row has wrong field count");
    ResultRow row;
    row.agent = parts[0];
    row.level = std::stoi(parts[1]);
    row.stochasticity = parts[2];
    row.horizon = std::stoi(parts[3]);
    row.seed = std::stoi(parts[4]);
    row.trials = std::stoi(parts[5]);
    row.successes = std::stoi(parts[6]);
    row.success_rate = std::stod(parts[7]);
    row.mean_steps_on_success = std::stod(parts[8]);
    row.planning_wall_time_ms = std::stod(parts[9]);
    rows.push_back(std::move(row));
  }
  return rows;
}

void emit_results(const std::vector<ResultRow>& rows, OutputFormat format,
                  const std::string& path) {
  if (rows.empty()) throw std::invalid_argument("no result rows to emit");
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  if (format == OutputFormat::Csv)
    out << results_to_csv(rows);
  else
    out << results_to_json(rows).dump(2) << '\n';
}

std::vector<int> parse_horizons(const std::string& text) {
  std::vector<int> horizons;
  std::istringstream in(text);
  std::string token;
  try {
    while (std::getline(in, token, ',')) {
      if (token.empty()) continue;
      const auto dots = token.find("..");
      if (dots == std::string::npos) {
        horizons.push_back(std::stoi(token));
        continue;
      }
      const int lo = std::stoi(token.substr(0, dots));
      const int hi = std::stoi(token.substr(dots + 2));
      if (lo > hi) throw ConfigError("empty horizon range: " + token);
      for (int h = lo; h <= hi; ++h) horizons.push_back(h);
    }
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception&) {
    throw ConfigError("cannot parse horizons: " + text);
  }
  if (horizons.empty()) throw ConfigError("no horizons given");
  return horizons;
}

BenchmarkConfig config_from_json(const nlohmann::json& j) {
  BenchmarkConfig config;
  if (j.contains("level")) config.level = j.at("level").get<int>();
  if (j.contains("stochasticity"))
    config.stochasticity =
        wind_stochasticity_from_string(j.at("stochasticity").get<std::string>());
  if (j.contains("agent"))
    config.agent = agent_kind_from_string(j.at("agent").get<std::string>());
  if (j.contains("agent_steps"))
    config.agent_steps = j.at("agent_steps").get<std::uint64_t>();
  if (j.contains("horizons")) {
    const auto& h = j.at("horizons");
    if (h.is_string())
      config.horizons = parse_horizons(h.get<std::string>());
    else
      config.horizons = h.get<std::vector<int>>();
  }
  if (j.contains("trials")) config.trials_per_point = j.at("trials").get<int>();
  if (j.contains("seeds")) config.seeds = j.at("seeds").get<int>();
  if (j.contains("geometry")) {
    // Unlike geometry_from_json, config files may override fields partially.
    const auto& g = j.at("geometry");
    GridGeometry geometry;
    if (g.contains("rows")) geometry.rows = g.at("rows").get<int>();
    if (g.contains("cols")) geometry.cols = g.at("cols").get<int>();
    if (g.contains("start"))
      geometry.start = StateIndex(g.at("start").get<int>());
    if (g.contains("goal")) geometry.goal = StateIndex(g.at("goal").get<int>());
    if (g.contains("wind_profile"))
      geometry.wind_profile = g.at("wind_profile").get<std::vector<int>>();
    if (g.contains("stochasticity"))
      geometry.stochasticity = wind_stochasticity_from_string(
          g.at("stochasticity").get<std::string>());
    config.geometry = geometry;
  }
  if (j.contains("epsilon"))
    config.preference_epsilon = j.at("epsilon").get<double>();
  if (j.contains("alpha_prior"))
    config.alpha_prior = j.at("alpha_prior").get<double>();
  if (j.contains("outcome_threshold"))
    config.pruning.outcome_threshold = j.at("outcome_threshold").get<double>();
  if (j.contains("action_threshold"))
    config.pruning.action_threshold = j.at("action_threshold").get<double>();
  if (j.contains("base_seed"))
    config.base_seed = j.at("base_seed").get<std::uint64_t>();
  if (j.contains("workers")) config.workers = j.at("workers").get<int>();
  if (j.contains("allow_long_horizons"))
    config.allow_long_horizons = j.at("allow_long_horizons").get<bool>();
  if (j.contains("out")) config.out_path = j.at("out").get<std::string>();
  if (j.contains("format")) {
    const auto format = j.at("format").get<std::string>();
    if (format == "csv")
      config.format = OutputFormat::Csv;
    else if (format == "json")
      config.format = OutputFormat::Json;
    else
      throw ConfigError("unknown format: " + format);
  }
  return config;
}

}  // namespace windplan
