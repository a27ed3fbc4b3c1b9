// Command-line front end: single searches, online episodes, experiment
// sweeps, maze generation, regret-bound studies and tree dumps.

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>

#include <CLI11.hpp>

#include "bayesplan/bound_check.hpp"
#include "bayesplan/episode.hpp"
#include "bayesplan/experiment.hpp"
#include "bayesplan/tree_dump.hpp"

namespace {

using namespace bayesplan;

struct PlannerFlags {
  std::string algorithm = "bts";
  int budget = 50;
  double alpha0 = -1.0;  // negative: keep the algorithm default
  double beta = -1.0;
  double puct_c = -1.0;
  double softmax_temp = -1.0;
  std::string commitment = "mcts";
  double commit_alpha = 0.25;
  double commit_temp = 2.0;
  int bins = kDefaultBins;
  bool deterministic = false;
  bool exact_cdf = false;

  PlannerConfig build(std::uint64_t seed) const {
    PlannerConfig cfg = default_config(algorithm_from_name(algorithm));
    cfg.budget = budget;
    if (alpha0 >= 0.0) cfg.alpha0 = alpha0;
    if (beta >= 0.0) cfg.beta = beta;
    if (puct_c >= 0.0) cfg.puct_c = puct_c;
    if (softmax_temp > 0.0) cfg.softmax_temp = softmax_temp;
    cfg.commitment = commit_rule_from_name(commitment);
    cfg.commit_alpha = commit_alpha;
    cfg.commit_temp = commit_temp;
    cfg.bins = bins;
    cfg.deterministic_mode = deterministic;
    cfg.exact_cdf = exact_cdf;
    cfg.seed = seed;
    return cfg;
  }
};

struct MazeFlags {
  std::uint64_t seed = 0;
  int width = 15;
  int height = 15;
  std::string file;
  int horizon = 50;

  std::shared_ptr<const MazeInstance> load() const {
    if (!file.empty()) {
      std::ifstream in(file);
      if (!in) throw std::runtime_error("cannot open maze file " + file);
      std::ostringstream buf;
      buf << in.rdbuf();
      return std::make_shared<const MazeInstance>(maze_from_text(buf.str()));
    }
    return std::make_shared<const MazeInstance>(
        maze_generate(seed, width, height));
  }
};

struct OracleFlags {
  std::string kind = "gt_sigma";
  double error_scale = 0.35;
  double sigma0 = 1.0;
  double noise_rho = 20.0;
  std::uint64_t predictor_seed = 1;
};

void add_planner_flags(CLI::App* cmd, PlannerFlags& f) {
  cmd->add_option("--algorithm", f.algorithm,
                  "tsts | bts | bayes-ucb | bayes-uct2 | puct | sh-puct | dng");
  cmd->add_option("--budget", f.budget,
                  "tree-search iterations per planning call");
  cmd->add_option("--alpha0", f.alpha0, "initial quantile of the schedule");
  cmd->add_option("--beta", f.beta, "schedule rate / Bayes-UCB beta");
  cmd->add_option("--puct-c", f.puct_c, "exploration constant");
  cmd->add_option("--softmax-temp", f.softmax_temp, "search prior temperature");
  cmd->add_option("--commitment", f.commitment, "mcts | quantile | softmax");
  cmd->add_option("--commit-alpha", f.commit_alpha,
                  "quantile commitment level");
  cmd->add_option("--commit-temp", f.commit_temp,
                  "softmax commitment temperature");
  cmd->add_option("--bins", f.bins, "bins for the max-backup tabulation");
  cmd->add_flag("--deterministic", f.deterministic,
                "re-seed the planner identically at every time step");
  cmd->add_flag("--exact-cdf", f.exact_cdf,
                "exact CDF path for quantiles and sampling");
}

void add_maze_flags(CLI::App* cmd, MazeFlags& f) {
  cmd->add_option("--maze-seed", f.seed, "maze generation seed");
  cmd->add_option("--width", f.width, "maze width (odd)");
  cmd->add_option("--height", f.height, "maze height (odd)");
  cmd->add_option("--maze-file", f.file, "text maze file instead of a seed");
  cmd->add_option("--horizon", f.horizon, "planning depth cap");
}

void add_oracle_flags(CLI::App* cmd, OracleFlags& f) {
  cmd->add_option("--oracle", f.kind,
                  "gt_sigma | fixed_sigma | gt_sigma_noise");
  cmd->add_option("--error-scale", f.error_scale, "predictor error scale");
  cmd->add_option("--sigma0", f.sigma0, "fixed-sigma control value");
  cmd->add_option("--noise-rho", f.noise_rho, "sigma perturbation percent");
  cmd->add_option("--predictor-seed", f.predictor_seed,
                  "predictor noise seed");
}

void require_seed_for_stochastic(const PlannerConfig& cfg, bool seed_given) {
  if (cfg.stochastic() && !seed_given) {
    throw std::runtime_error(
        "--seed is required for stochastic planners/commitments");
  }
}

std::shared_ptr<const QueryProvider> build_oracle(
    const OracleFlags& flags, const DecisionProcess& env,
    const GroundTruthSource& gt) {
  auto predictor = std::make_shared<const CorruptedPredictor>(
      env, gt, flags.error_scale, flags.predictor_seed);
  if (flags.kind == "gt_sigma") return gt_sigma_query(predictor);
  if (flags.kind == "fixed_sigma") {
    return fixed_sigma_query(predictor, flags.sigma0);
  }
  if (flags.kind == "gt_sigma_noise") {
    std::shared_ptr<const QueryProvider> inner = gt_sigma_query(predictor);
    Rng rng(derive_seed({flags.predictor_seed, 0x726f68ULL}));
    return perturb_sigma(std::move(inner), env, flags.noise_rho, rng);
  }
  throw std::runtime_error("unknown oracle kind " + flags.kind);
}

int cmd_plan(const MazeFlags& maze_flags, const PlannerFlags& planner_flags,
             const OracleFlags& oracle_flags, std::uint64_t seed,
             bool seed_given, bool as_json) {
  const PlannerConfig cfg = planner_flags.build(seed);
  require_seed_for_stochastic(cfg, seed_given);
  const auto maze = maze_flags.load();
  const MazeProcess env(maze, maze->start, maze_flags.horizon);
  const auto oracle = build_oracle(oracle_flags, env, env);

  Rng rng(seed);
  const SearchOutcome outcome = cfg.algorithm == Algorithm::sh_puct
                                    ? run_search_sh(env, *oracle, cfg, rng)
                                    : run_search(env, *oracle, cfg, rng);
  Rng commit_rng(derive_seed({seed, 0x636f6d74ULL}));
  const int action = commit(outcome, cfg, commit_rng);

  if (as_json) {
    std::cout << dump_tree_json(*outcome.tree) << "\n";
    return 0;
  }
  static const char* kNames[] = {"up", "down", "left", "right"};
  std::printf("search: %s, budget %d, %zu nodes, max depth %d\n",
              cfg.label().c_str(), cfg.budget, outcome.tree_stats.node_count,
              outcome.tree_stats.max_depth);
  std::printf("%-7s %10s %12s %12s %12s %7s\n", "action", "reward",
              "post.mean", "post.std", "branch", "visits");
  const SearchNode& root = outcome.tree->root_node();
  for (std::size_t a = 0; a < root.edges.size(); ++a) {
    const EdgeStat& e = root.edges[a];
    std::printf("%-7s %10.3f %12.4f %12.4f %12.4f %7d\n", kNames[a], e.reward,
                e.posterior.mean(), std::sqrt(e.posterior.var()),
                outcome.root_backed_values[a], e.visit_count);
  }
  std::printf("committed action: %s\n", kNames[action]);
  return 0;
}

int cmd_episode(const MazeFlags& maze_flags, const PlannerFlags& planner_flags,
                const OracleFlags& oracle_flags, std::uint64_t seed,
                bool seed_given, int steps_cap) {
  const PlannerConfig cfg = planner_flags.build(seed);
  require_seed_for_stochastic(cfg, seed_given);
  const auto maze = maze_flags.load();
  MazeDomain domain(maze, maze_flags.horizon);
  OracleFactory factory = [&oracle_flags](const DecisionProcess& env)
      -> std::shared_ptr<const QueryProvider> {
    const auto& gt = dynamic_cast<const GroundTruthSource&>(env);
    return build_oracle(oracle_flags, env, gt);
  };
  const EpisodeResult ep = online_episode(domain, cfg, factory, steps_cap, seed);
  std::printf("solved: %s\n", ep.solved ? "yes" : "no");
  std::printf("steps: %d (cap %d)\n", ep.steps_taken, steps_cap);
  std::printf("mean regret per search iteration: %.4f\n", ep.mean_regret);
  static const char* kNames[] = {"U", "D", "L", "R"};
  std::printf("actions:");
  for (int a : ep.committed_actions) std::printf(" %s", kNames[a]);
  std::printf("\n");
  return ep.solved ? 0 : 2;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "Bayesian online planning over deterministic decision processes"};
  app.require_subcommand(1);

  MazeFlags plan_maze;
  PlannerFlags plan_planner;
  OracleFlags plan_oracle;
  std::uint64_t plan_seed = 0;
  CLI::App* plan = app.add_subcommand("plan", "one search on one maze");
  add_maze_flags(plan, plan_maze);
  add_planner_flags(plan, plan_planner);
  add_oracle_flags(plan, plan_oracle);
  CLI::Option* plan_seed_opt =
      plan->add_option("--seed", plan_seed, "search seed");

  MazeFlags ep_maze;
  PlannerFlags ep_planner;
  OracleFlags ep_oracle;
  std::uint64_t ep_seed = 0;
  int steps_cap = 200;
  CLI::App* episode =
      app.add_subcommand("episode", "one online planning episode");
  add_maze_flags(episode, ep_maze);
  add_planner_flags(episode, ep_planner);
  add_oracle_flags(episode, ep_oracle);
  episode->add_option("--steps-cap", steps_cap, "environment step cap");
  CLI::Option* ep_seed_opt =
      episode->add_option("--seed", ep_seed, "episode seed");

  std::string spec_path;
  int workers = 1;
  bool timing = false;
  CLI::App* experiment =
      app.add_subcommand("experiment", "full sweep from a spec file");
  experiment->add_option("spec", spec_path, "experiment spec file")->required();
  experiment->add_option("--workers", workers, "parallel episode workers");
  experiment->add_flag("--timing", timing,
                       "record wall-clock times (breaks byte-for-byte "
                       "reproducibility of the CSV)");

  MazeFlags gen_flags;
  std::string gen_out;
  CLI::App* gen = app.add_subcommand("gen-maze", "emit a text-format maze");
  gen->add_option("--seed", gen_flags.seed, "generation seed");
  gen->add_option("--width", gen_flags.width, "width (odd)");
  gen->add_option("--height", gen_flags.height, "height (odd)");
  gen->add_option("-o,--output", gen_out, "output file (stdout by default)");

  int bc_depth = 3, bc_branching = 2, bc_budget = 14, bc_reps = 10000;
  std::string bc_prior = "uniform", bc_selector = "tsts";
  double bc_mass = 0.93;
  std::uint64_t bc_edge = 0, bc_seed = 0;
  CLI::App* bc = app.add_subcommand(
      "bound-check", "empirical regret against the information bound");
  bc->add_option("--depth", bc_depth, "needle tree depth");
  bc->add_option("--branching", bc_branching, "actions per state");
  bc->add_option("--prior", bc_prior, "uniform | concentrated | point");
  bc->add_option("--prior-mass", bc_mass, "mass on the favored edge");
  bc->add_option("--prior-edge", bc_edge, "favored edge index");
  bc->add_option("--budget", bc_budget, "largest search budget");
  bc->add_option("--reps", bc_reps, "sampled trees");
  bc->add_option("--selector", bc_selector, "tsts | agnostic | adversarial");
  bc->add_option("--seed", bc_seed, "sampling seed");

  MazeFlags dump_maze;
  PlannerFlags dump_planner;
  OracleFlags dump_oracle;
  std::uint64_t dump_seed = 0;
  CLI::App* dump = app.add_subcommand(
      "dump-tree", "run one search, print the tree as JSON");
  add_maze_flags(dump, dump_maze);
  add_planner_flags(dump, dump_planner);
  add_oracle_flags(dump, dump_oracle);
  CLI::Option* dump_seed_opt =
      dump->add_option("--seed", dump_seed, "search seed");

  CLI11_PARSE(app, argc, argv);

  try {
    if (plan->parsed()) {
      return cmd_plan(plan_maze, plan_planner, plan_oracle, plan_seed,
                      plan_seed_opt->count() > 0, false);
    }
    if (episode->parsed()) {
      return cmd_episode(ep_maze, ep_planner, ep_oracle, ep_seed,
                         ep_seed_opt->count() > 0, steps_cap);
    }
    if (experiment->parsed()) {
      const ExperimentSpec spec = parse_experiment_file(spec_path);
      const ExperimentSummary s = run_experiment(spec, workers, timing);
      std::printf("rows: %zu total, %zu computed this run\n", s.rows_total,
                  s.rows_computed);
      std::printf("csv:  %s\njson: %s\n", s.csv_path.c_str(),
                  s.json_path.c_str());
      return 0;
    }
    if (gen->parsed()) {
      const MazeInstance maze =
          maze_generate(gen_flags.seed, gen_flags.width, gen_flags.height);
      const std::string text = maze_to_text(maze);
      if (gen_out.empty()) {
        std::cout << text;
      } else {
        std::ofstream out(gen_out);
        if (!out) throw std::runtime_error("cannot write " + gen_out);
        out << text;
      }
      return 0;
    }
    if (bc->parsed()) {
      NeedleFamily family;
      if (bc_prior == "uniform") {
        family = make_needle_family(bc_depth, bc_branching);
      } else if (bc_prior == "concentrated") {
        family = make_needle_family_concentrated(bc_depth, bc_branching,
                                                 bc_mass, bc_edge);
      } else if (bc_prior == "point") {
        family = make_needle_family_concentrated(bc_depth, bc_branching, 1.0,
                                                 bc_edge);
      } else {
        throw std::runtime_error("unknown prior " + bc_prior);
      }
      const BoundCheckReport report =
          bound_check(family, bound_selector_from_name(bc_selector), bc_budget,
                      bc_reps, bc_seed);
      std::cout << format_bound_report(report);
      return report.pass ? 0 : 3;
    }
    if (dump->parsed()) {
      return cmd_plan(dump_maze, dump_planner, dump_oracle, dump_seed,
                      dump_seed_opt->count() > 0, true);
    }
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
