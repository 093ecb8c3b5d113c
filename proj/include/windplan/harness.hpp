#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "windplan/gridworld.hpp"
#include "windplan/planner_pomdp.hpp"

namespace windplan {

/// Invalid benchmark configuration (bad level/agent pairing, bad flags).
/// The CLI maps this to exit code 2.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class AgentKind { Sophisticated, SophLearnedB, QLearning, Random };

std::string to_string(AgentKind agent);
AgentKind agent_kind_from_string(const std::string& name);

enum class OutputFormat { Csv, Json };

struct BenchmarkConfig {
  int level = 1;
  WindStochasticity stochasticity = WindStochasticity::Deterministic;
  AgentKind agent = AgentKind::Sophisticated;
  /// B-updates for SophLearnedB, training time-steps for QLearning.
  std::uint64_t agent_steps = 0;
  std::vector<int> horizons;
  int trials_per_point = 100;
  int seeds = 10;
  GridGeometry geometry;
  double preference_epsilon = 1e-12;
  /// Dirichlet prior per count cell; 0 selects 1/num_states (one pseudo
  /// observation per column, spread uniformly).
  double alpha_prior = 0.0;
  PruningConfig pruning;
  std::uint64_t base_seed = 0;
  int workers = 0;  // 0 -> WINDPLAN_WORKERS env var, then hardware
  bool allow_long_horizons = false;  // lifts the Level-5 soft cap (T <= 12)
  std::string out_path;
  OutputFormat format = OutputFormat::Csv;

  /// Agent label as emitted in result rows, e.g. "qlearning-5000".
  std::string agent_label() const;

  /// Throws ConfigError on invalid level/agent/stochasticity combinations.
  void validate() const;
};

struct ResultRow {
  std::string agent;
  int level = 0;
  std::string stochasticity;
  int horizon = 0;
  int seed = 0;
  int trials = 0;
  int successes = 0;
  double success_rate = 0.0;
  double mean_steps_on_success = 0.0;  // 0 when there were no successes
  double planning_wall_time_ms = 0.0;
};

/// Runs the full sweep: one row per (horizon, seed), trials_per_point
/// episodes each. Deterministic given the config apart from wall times;
/// cells execute concurrently with independent seeded streams.
std::vector<ResultRow> run_benchmark(const BenchmarkConfig& config);

std::string results_to_csv(const std::vector<ResultRow>& rows);
nlohmann::json results_to_json(const std::vector<ResultRow>& rows);
std::vector<ResultRow> results_from_csv(const std::string& csv);
void emit_results(const std::vector<ResultRow>& rows, OutputFormat format,
                  const std::string& path);

/// Parses "6..20", "4", or comma lists like "1..4,8" into horizons.
std::vector<int> parse_horizons(const std::string& text);

BenchmarkConfig config_from_json(const nlohmann::json& j);

/// CLI entry point; subcommands: run, learn-b, inspect, repro.
/// Returns 0 on success, 2 on configuration/usage errors.
int cli_main(int argc, const char* const* argv);

}  // namespace windplan
