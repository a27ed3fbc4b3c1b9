#include "bayesplan/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>
#include <thread>

#include <json.hpp>

#include "bayesplan/oracle.hpp"

namespace bayesplan {

namespace {

constexpr std::uint64_t kPredictorSalt = 0x6e657477ULL;
constexpr std::uint64_t kEpisodeSalt = 0x65706973ULL;

const char* kCsvHeader = "planner,budget,env_seed,rep,solved,steps,mean_regret,wall_ms\n";

struct Cell {
  std::size_t planner_index = 0;
  int budget = 0;
  std::uint64_t env_seed = 0;
  int rep = 0;
};

std::string cell_key(const std::string& planner, int budget,
                     std::uint64_t env_seed, int rep) {
  std::ostringstream k;
  k << planner << '\x1f' << budget << '\x1f' << env_seed << '\x1f' << rep;
  return k.str();
}

std::uint64_t hash_label(const std::string& label) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (char c : label) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace

PlannerConfig parse_planner_section(const ConfigSection& s) {
  const Algorithm algorithm =
      algorithm_from_name(s.get("algorithm", "bts"));
  PlannerConfig cfg = default_config(algorithm);
  cfg.budget = s.get_int("budget", cfg.budget);
  cfg.alpha0 = s.get_double("alpha0", cfg.alpha0);
  cfg.beta = s.get_double("beta", cfg.beta);
  cfg.puct_c = s.get_double("puct_c", cfg.puct_c);
  cfg.softmax_temp = s.get_double("softmax_temp", cfg.softmax_temp);
  cfg.commitment = commit_rule_from_name(s.get("commitment", "mcts"));
  cfg.commit_alpha = s.get_double("commit_alpha", cfg.commit_alpha);
  cfg.commit_temp = s.get_double("commit_temp", cfg.commit_temp);
  cfg.seed = s.get_u64("seed", cfg.seed);
  cfg.deterministic_mode = s.get_bool("deterministic", cfg.deterministic_mode);
  cfg.bins = s.get_int("bins", cfg.bins);
  cfg.exact_cdf = s.get_bool("exact_cdf", cfg.exact_cdf);
  cfg.dng_mu0 = s.get_double("dng_mu0", cfg.dng_mu0);
  cfg.dng_lambda = s.get_double("dng_lambda", cfg.dng_lambda);
  cfg.dng_alpha = s.get_double("dng_alpha", cfg.dng_alpha);
  cfg.dng_beta = s.get_double("dng_beta", cfg.dng_beta);
  cfg.name = s.get("name", "");
  return cfg;
}

ExperimentSpec parse_experiment_spec(const std::vector<ConfigSection>& cfg) {
  ExperimentSpec spec;
  bool saw_experiment = false;
  for (const ConfigSection& s : cfg) {
    if (s.name == "experiment" || s.name.empty()) {
      saw_experiment = true;
      spec.name = s.get("name", spec.name);
      const std::string env = s.get("env", "maze");
      if (env != "maze") {
        throw std::invalid_argument("experiment: unsupported env " + env);
      }
      spec.maze_width = s.get_int("maze_width", spec.maze_width);
      spec.maze_height = s.get_int("maze_height", spec.maze_height);
      spec.horizon = s.get_int("horizon", spec.horizon);
      if (s.has("env_seeds")) spec.env_seeds = parse_u64_list(s.get("env_seeds", ""));
      if (s.has("budgets")) spec.budgets = parse_int_list(s.get("budgets", ""));
      spec.episode_cap = s.get_int("episode_cap", spec.episode_cap);
      spec.repetitions = s.get_int("repetitions", spec.repetitions);
      spec.seed = s.get_u64("seed", spec.seed);
      spec.output = s.get("output", spec.output);
      const std::string oracle = s.get("oracle", "gt_sigma");
      if (oracle == "gt_sigma") {
        spec.oracle.kind = OracleKind::gt_sigma;
      } else if (oracle == "fixed_sigma") {
        spec.oracle.kind = OracleKind::fixed_sigma;
      } else if (oracle == "gt_sigma_noise") {
        spec.oracle.kind = OracleKind::gt_sigma_noise;
      } else {
        throw std::invalid_argument("experiment: unknown oracle " + oracle);
      }
      spec.oracle.error_scale = s.get_double("error_scale", spec.oracle.error_scale);
      spec.oracle.sigma0 = s.get_double("sigma0", spec.oracle.sigma0);
      spec.oracle.noise_rho = s.get_double("noise_rho", spec.oracle.noise_rho);
    } else if (s.name == "planner") {
      spec.planners.push_back(parse_planner_section(s));
    } else {
      throw std::invalid_argument("experiment: unknown section " + s.name);
    }
  }
  if (!saw_experiment) {
    throw std::invalid_argument("experiment: missing [experiment] section");
  }
  if (spec.planners.empty()) {
    throw std::invalid_argument("experiment: no [planner] sections");
  }
  if (spec.env_seeds.empty()) {
    throw std::invalid_argument("experiment: env_seeds is empty");
  }
  if (spec.budgets.empty()) {
    throw std::invalid_argument("experiment: budgets is empty");
  }
  std::set<std::string> labels;
  for (const PlannerConfig& p : spec.planners) {
    if (p.label().find(',') != std::string::npos) {
      throw std::invalid_argument("experiment: planner label contains a comma");
    }
    if (!labels.insert(p.label()).second) {
      throw std::invalid_argument("experiment: duplicate planner label " +
                                  p.label());
    }
  }
  return spec;
}

ExperimentSpec parse_experiment_file(const std::string& path) {
  return parse_experiment_spec(parse_config_file(path));
}

std::shared_ptr<const QueryProvider> make_oracle(
    const OracleSpec& oracle, const DecisionProcess& env,
    const GroundTruthSource& gt, std::uint64_t predictor_seed) {
  auto predictor = std::make_shared<const CorruptedPredictor>(
      env, gt, oracle.error_scale, predictor_seed);
  switch (oracle.kind) {
    case OracleKind::gt_sigma:
      return gt_sigma_query(predictor);
    case OracleKind::fixed_sigma:
      return fixed_sigma_query(predictor, oracle.sigma0);
    case OracleKind::gt_sigma_noise: {
      std::shared_ptr<const QueryProvider> inner = gt_sigma_query(predictor);
      Rng rng(derive_seed({predictor_seed, 0x726f68ULL}));
      return perturb_sigma(std::move(inner), env, oracle.noise_rho, rng);
    }
  }
  throw std::logic_error("make_oracle: unhandled kind");
}

EpisodeResult run_maze_episode(const ExperimentSpec& spec,
                               const PlannerConfig& planner, int budget,
                               std::uint64_t env_seed, int rep) {
  auto maze = std::make_shared<const MazeInstance>(
      maze_generate(env_seed, spec.maze_width, spec.maze_height));
  MazeDomain domain(maze, spec.horizon);
  const std::uint64_t predictor_seed =
      derive_seed({kPredictorSalt, spec.seed, env_seed});

  // One provider per planning process; predictions depend only on the maze
  // tile, so every step sees the same fixed predictor.
  OracleFactory factory =
      [&spec, predictor_seed](const DecisionProcess& process)
      -> std::shared_ptr<const QueryProvider> {
    const auto& gt = dynamic_cast<const GroundTruthSource&>(process);
    return make_oracle(spec.oracle, process, gt, predictor_seed);
  };

  PlannerConfig cfg = planner;
  cfg.budget = budget;
  const std::uint64_t episode_seed = derive_seed(
      {kEpisodeSalt, spec.seed, env_seed, hash_label(cfg.label()),
       static_cast<std::uint64_t>(budget), static_cast<std::uint64_t>(rep)});
  return online_episode(domain, cfg, factory, spec.episode_cap, episode_seed);
}

std::string format_csv_row(const ResultRecord& r) {
  char buf[256];
  std::snprintf(buf, sizeof(buf), "%s,%d,%llu,%d,%d,%d,%.6f,%lld\n",
                r.planner.c_str(), r.budget,
                static_cast<unsigned long long>(r.env_seed), r.rep,
                r.solved ? 1 : 0, r.steps, r.mean_regret, r.wall_ms);
  return buf;
}

ExperimentSummary run_experiment(const ExperimentSpec& spec, int workers,
                                 bool timing) {
  const std::string csv_path = spec.output + ".csv";
  const std::string json_path = spec.output + ".json";

  // Fail on an unwritable output before doing any work.
  {
    std::ofstream probe(csv_path, std::ios::app);
    if (!probe) {
      throw std::runtime_error("run_experiment: cannot write " + csv_path);
    }
  }

  // Completed rows from a previous run are skipped and still contribute to
  // the summary.
  std::set<std::string> done;
  std::vector<ResultRecord> existing;
  bool file_has_header = false;
  {
    std::ifstream in(csv_path);
    std::string line;
    bool header = true;
    while (std::getline(in, line)) {
      if (header) {
        header = false;
        file_has_header = true;
        continue;
      }
      std::istringstream row(line);
      ResultRecord r;
      std::string field;
      std::getline(row, r.planner, ',');
      std::getline(row, field, ',');
      r.budget = std::stoi(field);
      std::getline(row, field, ',');
      r.env_seed = std::stoull(field);
      std::getline(row, field, ',');
      r.rep = std::stoi(field);
      std::getline(row, field, ',');
      r.solved = field == "1";
      std::getline(row, field, ',');
      r.steps = std::stoi(field);
      std::getline(row, field, ',');
      r.mean_regret = std::stod(field);
      std::getline(row, field, ',');
      r.wall_ms = std::stoll(field);
      done.insert(cell_key(r.planner, r.budget, r.env_seed, r.rep));
      existing.push_back(std::move(r));
    }
  }

  // Canonical cell order: planner, budget, env seed, repetition.
  std::vector<Cell> cells;
  for (std::size_t p = 0; p < spec.planners.size(); ++p) {
    for (int budget : spec.budgets) {
      for (std::uint64_t env_seed : spec.env_seeds) {
        for (int rep = 0; rep < spec.repetitions; ++rep) {
          if (done.contains(cell_key(spec.planners[p].label(), budget,
                                     env_seed, rep))) {
            continue;
          }
          cells.push_back({p, budget, env_seed, rep});
        }
      }
    }
  }

  std::vector<ResultRecord> fresh(cells.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&]() {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= cells.size()) return;
      const Cell& c = cells[i];
      const PlannerConfig& planner = spec.planners[c.planner_index];
      const auto t0 = std::chrono::steady_clock::now();
      const EpisodeResult ep =
          run_maze_episode(spec, planner, c.budget, c.env_seed, c.rep);
      const auto t1 = std::chrono::steady_clock::now();
      ResultRecord r;
      r.planner = planner.label();
      r.budget = c.budget;
      r.env_seed = c.env_seed;
      r.rep = c.rep;
      r.solved = ep.solved;
      r.steps = ep.steps_taken;
      r.mean_regret = ep.mean_regret;
      r.wall_ms =
          timing ? std::chrono::duration_cast<std::chrono::milliseconds>(t1 - t0)
                       .count()
                 : 0;
      fresh[i] = std::move(r);
    }
  };

  const int n_workers = std::max(1, workers);
  if (n_workers == 1 || cells.size() <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(n_workers));
    for (int w = 0; w < n_workers; ++w) pool.emplace_back(worker);
    for (std::thread& t : pool) t.join();
  }

  {
    std::ofstream out(csv_path, std::ios::app);
    if (!file_has_header) out << kCsvHeader;
    for (const ResultRecord& r : fresh) out << format_csv_row(r);
  }

  // Summary over every row, resumed and fresh.
  std::vector<const ResultRecord*> all;
  all.reserve(existing.size() + fresh.size());
  for (const ResultRecord& r : existing) all.push_back(&r);
  for (const ResultRecord& r : fresh) all.push_back(&r);

  struct Agg {
    std::size_t n = 0;
    double solved = 0.0, solved_sq = 0.0;
    double steps = 0.0;
    double regret = 0.0;
  };
  std::map<std::pair<std::string, int>, Agg> agg;
  for (const ResultRecord* r : all) {
    Agg& a = agg[{r->planner, r->budget}];
    a.n += 1;
    const double s = r->solved ? 1.0 : 0.0;
    a.solved += s;
    a.solved_sq += s * s;
    a.steps += r->steps;
    a.regret += r->mean_regret;
  }

  nlohmann::json summary;
  summary["name"] = spec.name;
  summary["cells"] = nlohmann::json::array();
  for (const auto& [key, a] : agg) {
    const double n = static_cast<double>(a.n);
    const double rate = a.solved / n;
    const double var = std::max(0.0, a.solved_sq / n - rate * rate);
    nlohmann::json cell;
    cell["planner"] = key.first;
    cell["budget"] = key.second;
    cell["episodes"] = a.n;
    cell["success_rate"] = rate;
    cell["success_stderr"] = n > 1 ? std::sqrt(var / (n - 1)) : 0.0;
    cell["mean_steps"] = a.steps / n;
    cell["mean_regret"] = a.regret / n;
    summary["cells"].push_back(std::move(cell));
  }
  {
    std::ofstream out(json_path, std::ios::trunc);
    out << summary.dump(2) << "\n";
  }

  ExperimentSummary result;
  result.rows_total = all.size();
  result.rows_computed = fresh.size();
  result.csv_path = csv_path;
  result.json_path = json_path;
  return result;
}

}  // namespace bayesplan
