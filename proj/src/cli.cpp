#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>

#include <CLI11.hpp>

#include "windplan/harness.hpp"
#include "windplan/learning.hpp"
#include "windplan/planner_pomdp.hpp"
#include "windplan/serialize.hpp"

namespace windplan {

namespace {

WindStochasticity default_stochasticity(int level) {
  return (level == 1 || level == 3) ? WindStochasticity::Deterministic
                                    : WindStochasticity::Medium;
}

/// Flags shared by run (and reused with fewer knobs elsewhere). Values are
/// parsed as strings first so that --config can fill whatever is not given
/// on the command line.
struct RunFlags {
  std::string config_path;
  std::string geometry_path;
  std::string horizons;
  std::string stochasticity;
  std::string agent;
  std::string out_path;
  std::string format;
  std::uint64_t agent_steps = 0;
  int level = 0;
  int trials = 0;
  int seeds = 0;
  double epsilon = 0.0;
  double alpha_prior = 0.0;
  double outcome_threshold = -1.0;
  double action_threshold = -1.0;
  std::int64_t base_seed = -1;
  int workers = -1;
  bool allow_long_horizons = false;
};

void add_run_options(CLI::App* cmd, RunFlags& flags) {
  cmd->add_option("--config", flags.config_path,
                  "JSON config file; explicit flags take precedence");
  cmd->add_option("--level", flags.level, "complexity level 1..5");
  cmd->add_option("--stochasticity", flags.stochasticity,
                  "deterministic|medium|high");
  cmd->add_option("--agent", flags.agent,
                  "sophisticated|soph-learned-b|qlearning|random");
  cmd->add_option("--agent-steps", flags.agent_steps,
                  "B-updates (soph-learned-b) or training steps (qlearning)");
  cmd->add_option("--horizons", flags.horizons,
                  "sweep, e.g. 6..20 or 4,8,12");
  cmd->add_option("--trials", flags.trials, "episodes per (horizon, seed)");
  cmd->add_option("--seeds", flags.seeds, "number of seeds");
  cmd->add_option("--epsilon", flags.epsilon, "preference smoothing epsilon");
  cmd->add_option("--alpha-prior", flags.alpha_prior,
                  "Dirichlet prior concentration");
  cmd->add_option("--outcome-threshold", flags.outcome_threshold,
                  "Occam's window over outcome branches");
  cmd->add_option("--action-threshold", flags.action_threshold,
                  "Occam's window over action priors");
  cmd->add_option("--base-seed", flags.base_seed, "master seed");
  cmd->add_option("--workers", flags.workers,
                  "parallel cells (also WINDPLAN_WORKERS)");
  cmd->add_option("--geometry", flags.geometry_path, "geometry JSON file");
  cmd->add_flag("--allow-long-horizons", flags.allow_long_horizons,
                "lift the level-5 horizon cap");
  cmd->add_option("--out", flags.out_path, "output path (stdout if omitted)");
  cmd->add_option("--format", flags.format, "csv|json");
}

BenchmarkConfig build_config(const RunFlags& flags) {
  BenchmarkConfig config;
  if (!flags.config_path.empty())
    config = config_from_json(load_json_file(flags.config_path));

  if (flags.level > 0) {
    config.level = flags.level;
    if (flags.stochasticity.empty() && flags.config_path.empty())
      config.stochasticity = default_stochasticity(flags.level);
  }
  if (!flags.stochasticity.empty())
    config.stochasticity = wind_stochasticity_from_string(flags.stochasticity);
  if (!flags.agent.empty())
    config.agent = agent_kind_from_string(flags.agent);
  if (flags.agent_steps > 0) config.agent_steps = flags.agent_steps;
  if (!flags.horizons.empty())
    config.horizons = parse_horizons(flags.horizons);
  if (flags.trials > 0) config.trials_per_point = flags.trials;
  if (flags.seeds > 0) config.seeds = flags.seeds;
  if (flags.epsilon > 0.0) config.preference_epsilon = flags.epsilon;
  if (flags.alpha_prior > 0.0) config.alpha_prior = flags.alpha_prior;
  if (flags.outcome_threshold >= 0.0)
    config.pruning.outcome_threshold = flags.outcome_threshold;
  if (flags.action_threshold >= 0.0)
    config.pruning.action_threshold = flags.action_threshold;
  if (flags.base_seed >= 0)
    config.base_seed = static_cast<std::uint64_t>(flags.base_seed);
  if (flags.workers >= 0) config.workers = flags.workers;
  if (flags.allow_long_horizons) config.allow_long_horizons = true;
  if (!flags.geometry_path.empty())
    config.geometry = geometry_from_json(load_json_file(flags.geometry_path));
  if (!flags.out_path.empty()) config.out_path = flags.out_path;
  if (!flags.format.empty()) {
    if (flags.format == "csv")
      config.format = OutputFormat::Csv;
    else if (flags.format == "json")
      config.format = OutputFormat::Json;
    else
      throw ConfigError("unknown format: " + flags.format);
  }
  if (config.horizons.empty()) config.horizons = parse_horizons("1..20");

  // Defaults when the training depth was never specified.
  if (config.agent_steps == 0) {
    if (config.agent == AgentKind::QLearning) config.agent_steps = 5000;
    if (config.agent == AgentKind::SophLearnedB) config.agent_steps = 10000;
  }
  return config;
}

int command_run(const RunFlags& flags) {
  const BenchmarkConfig config = build_config(flags);
  const std::vector<ResultRow> rows = run_benchmark(config);
  if (config.out_path.empty()) {
    if (config.format == OutputFormat::Csv)
      std::cout << results_to_csv(rows);
    else
      std::cout << results_to_json(rows).dump(2) << '\n';
  } else {
    emit_results(rows, config.format, config.out_path);
    std::cerr << "wrote " << rows.size() << " rows to " << config.out_path
              << "\n";
  }
  return 0;
}

struct LearnFlags {
  int level = 3;
  std::string stochasticity;
  std::uint64_t steps = 5000;
  std::uint64_t seed = 0;
  double alpha = 0.0;  // 0 -> 1/num_states
  int horizon = 0;     // 0 -> uncapped exploration episodes
  std::string geometry_path;
  std::string out_path = "b.json";
};

int command_learn_b(const LearnFlags& flags) {
  GridGeometry geometry;
  if (!flags.geometry_path.empty())
    geometry = geometry_from_json(load_json_file(flags.geometry_path));
  geometry.stochasticity = flags.stochasticity.empty()
                               ? default_stochasticity(flags.level)
                               : wind_stochasticity_from_string(
                                     flags.stochasticity);

  const Environment env = make_environment(geometry);
  const double alpha =
      flags.alpha > 0.0 ? flags.alpha : 1.0 / geometry.num_states();
  Rng rng(derive_seed(flags.seed, flags.level, flags.horizon));
  const int cap = flags.horizon > 0 ? std::max(1, flags.horizon - 1) : 0;
  const DirichletCounts counts =
      explore_random(env, flags.steps, rng, alpha, cap);
  save_json_file(to_json(counts), flags.out_path);

  const double deviation =
      model_accuracy(normalize_counts(counts), env.transitions);
  std::cout << "explored " << counts.steps << " transitions; deviation from "
            << "true dynamics " << deviation << "; wrote " << flags.out_path
            << "\n";
  return 0;
}

struct InspectFlags {
  int level = 1;
  std::string stochasticity;
  std::string geometry_path;
  std::string dump_b_path;
  bool preimages = false;
  bool trace_episode = false;
  int horizon = 10;
  std::uint64_t seed = 0;
  std::string trace_out;
};

int command_inspect(const InspectFlags& flags) {
  GridGeometry geometry;
  if (!flags.geometry_path.empty())
    geometry = geometry_from_json(load_json_file(flags.geometry_path));
  geometry.stochasticity = flags.stochasticity.empty()
                               ? default_stochasticity(flags.level)
                               : wind_stochasticity_from_string(
                                     flags.stochasticity);
  const Environment env = make_environment(geometry);
  const LikelihoodModel likelihood = build_likelihood_tensor(geometry);

  std::cout << "geometry: " << to_json(geometry).dump() << "\n";

  int max_support = 0;
  for (int prev = 0; prev < geometry.num_states(); ++prev) {
    for (int a = 0; a < kNumActions; ++a) {
      int nnz = 0;
      for (int next = 0; next < geometry.num_states(); ++next)
        if (env.transitions.at(next, prev, a) > 0.0) ++nnz;
      max_support = std::max(max_support, nnz);
    }
  }
  std::cout << "transition tensor: shape [" << geometry.num_states() << ", "
            << geometry.num_states() << ", " << kNumActions
            << "], max column support " << max_support << "\n";

  for (int m = 0; m < likelihood.num_modalities(); ++m) {
    std::cout << "modality " << (m + 1) << " alphabet:";
    for (int value : likelihood.modality(m).alphabet) std::cout << ' ' << value;
    std::cout << "\n";
  }

  if (flags.preimages) {
    std::map<std::pair<int, int>, std::vector<int>> classes;
    for (int i = 1; i <= geometry.num_states(); ++i) {
      const ObservationPair o = observe(StateIndex(i), geometry);
      classes[{o.sum, o.product}].push_back(i);
    }
    std::cout << "observation preimages (pair -> states):\n";
    for (const auto& [pair, states] : classes) {
      std::cout << "  (" << pair.first << ", " << pair.second << ") ->";
      for (int s : states) std::cout << ' ' << s;
      std::cout << "\n";
    }
  }

  if (!flags.dump_b_path.empty()) {
    save_json_file(to_json(env.transitions), flags.dump_b_path);
    std::cout << "wrote transition tensor to " << flags.dump_b_path << "\n";
  }

  if (flags.trace_episode) {
    if (geometry.stochasticity == WindStochasticity::Deterministic)
      throw ConfigError("trace-episode runs the level-5 planner; pick medium "
                        "or high stochasticity");
    PomdpModel model{env.transitions, likelihood, geometry.goal, 1e-12};
    BeliefPlanner planner(std::move(model), flags.horizon);
    Rng rng(flags.seed);
    PomdpEpisodeOptions options;
    std::ofstream file;
    if (!flags.trace_out.empty()) {
      file.open(flags.trace_out);
      if (!file) throw std::runtime_error("cannot open " + flags.trace_out);
      options.trace = &file;
    } else {
      options.trace = &std::cout;
    }
    const EpisodeResult episode = run_episode_pomdp(planner, env, rng, options);
    std::cout << (episode.reached_goal ? "reached goal in " : "failed after ")
              << episode.steps_used << " steps\n";
  }
  return 0;
}

struct ReproFlags {
  std::string figure;
  std::string out_dir = ".";
  int trials = 100;
  int seeds = 10;
  std::uint64_t base_seed = 0;
  int workers = -1;
};

struct ReproAgent {
  AgentKind kind;
  std::uint64_t steps;
};

int command_repro(const ReproFlags& flags) {
  struct Setting {
    int level;
    WindStochasticity stochasticity;
    std::string horizons;
    std::vector<ReproAgent> agents;
    std::string file_name;
  };

  std::vector<Setting> settings;
  const std::vector<WindStochasticity> both = {WindStochasticity::Medium,
                                               WindStochasticity::High};
  if (flags.figure == "figA1") {
    settings.push_back({1,
                        WindStochasticity::Deterministic,
                        "1..20",
                        {{AgentKind::Sophisticated, 0},
                         {AgentKind::QLearning, 500},
                         {AgentKind::QLearning, 5000},
                         {AgentKind::Random, 0}},
                        "figA1.csv"});
  } else if (flags.figure == "figA2") {
    settings.push_back({3,
                        WindStochasticity::Deterministic,
                        "1..20",
                        {{AgentKind::SophLearnedB, 5000},
                         {AgentKind::SophLearnedB, 10000},
                         {AgentKind::QLearning, 5000}},
                        "figA2.csv"});
  } else if (flags.figure == "fig2-top") {
    for (auto s : both)
      settings.push_back({2,
                          s,
                          "1..20",
                          {{AgentKind::Sophisticated, 0},
                           {AgentKind::QLearning, 5000},
                           {AgentKind::QLearning, 10000}},
                          "fig2-top-" + to_string(s) + ".csv"});
  } else if (flags.figure == "fig2-mid") {
    for (auto s : both)
      settings.push_back({4,
                          s,
                          "1..20",
                          {{AgentKind::SophLearnedB, 5000},
                           {AgentKind::SophLearnedB, 10000},
                           {AgentKind::QLearning, 10000}},
                          "fig2-mid-" + to_string(s) + ".csv"});
  } else if (flags.figure == "fig2-bottom") {
    for (auto s : both)
      settings.push_back({5,
                          s,
                          "1..12",
                          {{AgentKind::Sophisticated, 0},
                           {AgentKind::QLearning, 20000}},
                          "fig2-bottom-" + to_string(s) + ".csv"});
  } else {
    throw ConfigError(
        "unknown figure '" + flags.figure +
        "'; expected fig2-top, fig2-mid, fig2-bottom, figA1 or figA2");
  }

  for (const auto& setting : settings) {
    std::vector<ResultRow> rows;
    for (const auto& agent : setting.agents) {
      BenchmarkConfig config;
      config.level = setting.level;
      config.stochasticity = setting.stochasticity;
      config.agent = agent.kind;
      config.agent_steps = agent.steps;
      config.horizons = parse_horizons(setting.horizons);
      config.trials_per_point = flags.trials;
      config.seeds = flags.seeds;
      config.base_seed = flags.base_seed;
      if (flags.workers >= 0) config.workers = flags.workers;
      const std::vector<ResultRow> part = run_benchmark(config);
      rows.insert(rows.end(), part.begin(), part.end());
    }
    const std::filesystem::path path =
        std::filesystem::path(flags.out_dir) / setting.file_name;
    emit_results(rows, OutputFormat::Csv, path.string());
    std::cerr << "wrote " << rows.size() << " rows to " << path.string()
              << "\n";
  }
  return 0;
}

}  // namespace

int cli_main(int argc, const char* const* argv) {
  CLI::App app{
      "windplan: expected-free-energy planning and tabular baselines on the "
      "windy grid-world"};
  app.require_subcommand(1);

  RunFlags run_flags;
  CLI::App* run_cmd = app.add_subcommand("run", "run a benchmark sweep");
  add_run_options(run_cmd, run_flags);

  LearnFlags learn_flags;
  CLI::App* learn_cmd = app.add_subcommand(
      "learn-b", "learn transition dynamics by random exploration");
  learn_cmd->add_option("--level", learn_flags.level, "complexity level");
  learn_cmd->add_option("--stochasticity", learn_flags.stochasticity,
                        "deterministic|medium|high");
  learn_cmd->add_option("--steps", learn_flags.steps, "exploration steps");
  learn_cmd->add_option("--seed", learn_flags.seed, "exploration seed");
  learn_cmd->add_option("--alpha", learn_flags.alpha,
                        "prior concentration (0 = 1/num_states)");
  learn_cmd->add_option("--horizon", learn_flags.horizon,
                        "episode cap during exploration (0 = uncapped)");
  learn_cmd->add_option("--geometry", learn_flags.geometry_path,
                        "geometry JSON file");
  learn_cmd->add_option("--out", learn_flags.out_path, "counts output path");

  InspectFlags inspect_flags;
  CLI::App* inspect_cmd = app.add_subcommand(
      "inspect", "print a level's models, alphabets and preimage classes");
  inspect_cmd->add_option("--level", inspect_flags.level, "complexity level");
  inspect_cmd->add_option("--stochasticity", inspect_flags.stochasticity,
                          "deterministic|medium|high");
  inspect_cmd->add_option("--geometry", inspect_flags.geometry_path,
                          "geometry JSON file");
  inspect_cmd->add_flag("--preimages", inspect_flags.preimages,
                        "list observation preimage classes");
  inspect_cmd->add_option("--dump-b", inspect_flags.dump_b_path,
                          "write the true transition tensor to a JSON file");
  inspect_cmd->add_flag("--trace-episode", inspect_flags.trace_episode,
                        "run one belief-planner episode, one JSON line per "
                        "step");
  inspect_cmd->add_option("--horizon", inspect_flags.horizon,
                          "horizon for --trace-episode");
  inspect_cmd->add_option("--seed", inspect_flags.seed,
                          "seed for --trace-episode");
  inspect_cmd->add_option("--trace-out", inspect_flags.trace_out,
                          "trace file (stdout if omitted)");

  ReproFlags repro_flags;
  CLI::App* repro_cmd = app.add_subcommand(
      "repro", "canned sweeps: fig2-top, fig2-mid, fig2-bottom, figA1, figA2");
  repro_cmd->add_option("figure", repro_flags.figure, "figure name")
      ->required();
  repro_cmd->add_option("--out-dir", repro_flags.out_dir, "output directory");
  repro_cmd->add_option("--trials", repro_flags.trials,
                        "episodes per (horizon, seed)");
  repro_cmd->add_option("--seeds", repro_flags.seeds, "number of seeds");
  repro_cmd->add_option("--base-seed", repro_flags.base_seed, "master seed");
  repro_cmd->add_option("--workers", repro_flags.workers, "parallel cells");

  try {
    app.parse(argc, argv);
    if (run_cmd->parsed()) return command_run(run_flags);
    if (learn_cmd->parsed()) return command_learn_b(learn_flags);
    if (inspect_cmd->parsed()) return command_inspect(inspect_flags);
    if (repro_cmd->parsed()) return command_repro(repro_flags);
    return 2;
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace windplan
