#pragma once

#include <string>
#include <vector>

#include "bayesplan/config.hpp"
#include "bayesplan/episode.hpp"

namespace bayesplan {

enum class OracleKind { gt_sigma, fixed_sigma, gt_sigma_noise };

struct OracleSpec {
  OracleKind kind = OracleKind::gt_sigma;
  double error_scale = 0.35;  // corrupted-predictor error scale
  double sigma0 = 1.0;        // fixed-sigma control
  double noise_rho = 0.0;     // percent perturbation of sigma
};

struct ExperimentSpec {
  std::string name = "experiment";
  int maze_width = 15;
  int maze_height = 15;
  int horizon = 50;
  std::vector<std::uint64_t> env_seeds;
  std::vector<int> budgets;
  std::vector<PlannerConfig> planners;
  int episode_cap = 200;
  int repetitions = 1;
  std::uint64_t seed = 0;
  std::string output = "results";  // prefix for .csv / .json
  OracleSpec oracle;
};

ExperimentSpec parse_experiment_spec(const std::vector<ConfigSection>& cfg);
ExperimentSpec parse_experiment_file(const std::string& path);
PlannerConfig parse_planner_section(const ConfigSection& section);

struct ResultRecord {
  std::string planner;
  int budget = 0;
  std::uint64_t env_seed = 0;
  int rep = 0;
  bool solved = false;
  int steps = 0;
  double mean_regret = 0.0;
  long long wall_ms = 0;
};

struct ExperimentSummary {
  std::size_t rows_total = 0;
  std::size_t rows_computed = 0;  // zero when fully resumed
  std::string csv_path;
  std::string json_path;
};

// Runs the Cartesian product (planner x budget x env seed x repetition) of
// maze episodes. Rows are appended to <output>.csv in canonical cell order
// and a per-cell summary is rewritten to <output>.json. Cells already
// present in the CSV are skipped, making interrupted runs resumable. The
// output bytes do not depend on the worker count; wall-clock timing is only
// recorded when `timing` is set, since it is inherently nonreproducible.
ExperimentSummary run_experiment(const ExperimentSpec& spec, int workers = 1,
                                 bool timing = false);

// One experiment cell, exposed for the CLI `episode` path and tests.
EpisodeResult run_maze_episode(const ExperimentSpec& spec,
                               const PlannerConfig& planner, int budget,
                               std::uint64_t env_seed, int rep);

std::string format_csv_row(const ResultRecord& r);

}  // namespace bayesplan
