#include "bayesplan/planners.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace bayesplan {

namespace {

constexpr double kLevelFloor = 0.001;
constexpr double kLevelCeil = 1.0 - 1e-12;

}  // namespace

std::string algorithm_name(Algorithm a) {
  switch (a) {
    case Algorithm::tsts: return "tsts";
    case Algorithm::bts: return "bts";
    case Algorithm::bayes_ucb: return "bayes-ucb";
    case Algorithm::bayes_uct2: return "bayes-uct2";
    case Algorithm::puct: return "puct";
    case Algorithm::sh_puct: return "sh-puct";
    case Algorithm::dng: return "dng";
  }
  return "?";
}

Algorithm algorithm_from_name(const std::string& name) {
  if (name == "tsts") return Algorithm::tsts;
  if (name == "bts") return Algorithm::bts;
  if (name == "bayes-ucb" || name == "bucb") return Algorithm::bayes_ucb;
  if (name == "bayes-uct2" || name == "buct2") return Algorithm::bayes_uct2;
  if (name == "puct" || name == "n-mcts") return Algorithm::puct;
  if (name == "sh-puct" || name == "sh-n-mcts") return Algorithm::sh_puct;
  if (name == "dng") return Algorithm::dng;
  throw std::invalid_argument("unknown algorithm: " + name);
}

std::string commit_rule_name(CommitRule c) {
  switch (c) {
    case CommitRule::mcts: return "mcts";
    case CommitRule::quantile: return "quantile";
    case CommitRule::softmax: return "softmax";
  }
  return "?";
}

CommitRule commit_rule_from_name(const std::string& name) {
  if (name == "mcts") return CommitRule::mcts;
  if (name == "quantile") return CommitRule::quantile;
  if (name == "softmax") return CommitRule::softmax;
  throw std::invalid_argument("unknown commitment rule: " + name);
}

PlannerConfig default_config(Algorithm algorithm) {
  PlannerConfig cfg;
  cfg.algorithm = algorithm;
  switch (algorithm) {
    case Algorithm::bts:
      cfg.alpha0 = 0.5;
      cfg.beta = 3.0;
      break;
    case Algorithm::bayes_ucb:
      cfg.beta = 0.5;
      break;
    default:
      break;
  }
  return cfg;
}

int select_tsts(const SearchNode& node, Rng& rng, CdfMode mode) {
  std::vector<double> scores(node.edges.size());
  for (std::size_t a = 0; a < node.edges.size(); ++a) {
    scores[a] = sample(node.edges[a].posterior, rng, mode);
  }
  return argmax_index(scores);
}

double bts_quantile_level(int visit_count, double alpha0, double beta) {
  return 1.0 - (1.0 - alpha0) * std::exp(-(visit_count - 1) / beta);
}

namespace {

int select_by_quantile(const SearchNode& node, double level, CdfMode mode) {
  level = std::clamp(level, kLevelFloor, kLevelCeil);
  std::vector<double> scores(node.edges.size());
  for (std::size_t a = 0; a < node.edges.size(); ++a) {
    scores[a] = quantile(node.edges[a].posterior, level, mode);
  }
  return argmax_index(scores);
}

}  // namespace

int select_bts(const SearchNode& node, double alpha0, double beta,
               CdfMode mode) {
  return select_by_quantile(
      node, bts_quantile_level(node.visit_count, alpha0, beta), mode);
}

int select_bayes_ucb(const SearchNode& node, double beta, CdfMode mode) {
  const double level = 1.0 - beta / static_cast<double>(node.visit_count);
  return select_by_quantile(node, level, mode);
}

double bayes_uct2_score(double mean, double var, int node_visits) {
  return mean + std::sqrt(2.0 * std::log(static_cast<double>(node_visits)) *
                          var);
}

int select_bayes_uct2(const SearchNode& node) {
  std::vector<double> scores(node.edges.size());
  for (std::size_t a = 0; a < node.edges.size(); ++a) {
    scores[a] = bayes_uct2_score(node.edges[a].posterior.mean(),
                                 node.edges[a].posterior.var(),
                                 node.visit_count);
  }
  return argmax_index(scores);
}

std::vector<double> puct_priors(const SearchNode& node, double temp) {
  std::vector<double> logits(node.edges.size());
  double hi = -std::numeric_limits<double>::infinity();
  for (std::size_t a = 0; a < node.edges.size(); ++a) {
    logits[a] = node.edges[a].prior_mean / temp;
    hi = std::max(hi, logits[a]);
  }
  double sum = 0.0;
  for (double& l : logits) {
    l = std::exp(l - hi);
    sum += l;
  }
  for (double& l : logits) l /= sum;
  return logits;
}

int select_puct(const SearchNode& node, double c, double temp) {
  const std::vector<double> prior = puct_priors(node, temp);
  const double sqrt_n = std::sqrt(static_cast<double>(node.visit_count));
  std::vector<double> scores(node.edges.size());
  for (std::size_t a = 0; a < node.edges.size(); ++a) {
    scores[a] = node.edges[a].value_mean +
                c * prior[a] * sqrt_n / (1.0 + node.edges[a].visit_count);
  }
  return argmax_index(scores);
}

DngStat dng_backup(const DngStat& stat, double r) {
  DngStat out = stat;
  out.alpha = stat.alpha + 0.5;
  out.beta = stat.beta +
             (stat.lambda * (r - stat.mu0) * (r - stat.mu0) /
              (stat.lambda + 1.0)) /
                 2.0;
  out.mu0 = (stat.lambda * stat.mu0 + r) / (stat.lambda + 1.0);
  out.lambda = stat.lambda + 1.0;
  return out;
}

int select_dng(const SearchNode& node, Rng& rng) {
  std::vector<double> scores(node.edges.size());
  for (std::size_t a = 0; a < node.edges.size(); ++a) {
    const EdgeStat& e = node.edges[a];
    if (e.visit_count == 0) {
      scores[a] = e.prior_mean;
      continue;
    }
    const double tau = rng.gamma(e.dng.alpha, e.dng.beta);
    scores[a] =
        e.dng.mu0 + rng.gaussian() / std::sqrt(e.dng.lambda * tau);
  }
  return argmax_index(scores);
}

SelectFn make_selector(const PlannerConfig& cfg) {
  const CdfMode mode = cfg.cdf_mode();
  switch (cfg.algorithm) {
    case Algorithm::tsts:
      return [mode](const SearchNode& n, Rng& rng) {
        return select_tsts(n, rng, mode);
      };
    case Algorithm::bts:
      return [a0 = cfg.alpha0, b = cfg.beta, mode](const SearchNode& n, Rng&) {
        return select_bts(n, a0, b, mode);
      };
    case Algorithm::bayes_ucb:
      return [b = cfg.beta, mode](const SearchNode& n, Rng&) {
        return select_bayes_ucb(n, b, mode);
      };
    case Algorithm::bayes_uct2:
      return [](const SearchNode& n, Rng&) { return select_bayes_uct2(n); };
    case Algorithm::puct:
    case Algorithm::sh_puct:
      return [c = cfg.puct_c, t = cfg.softmax_temp](const SearchNode& n, Rng&) {
        return select_puct(n, c, t);
      };
    case Algorithm::dng:
      return [](const SearchNode& n, Rng& rng) { return select_dng(n, rng); };
  }
  throw std::logic_error("make_selector: unhandled algorithm");
}

namespace {

void init_dng_stats(SearchNode& node, const PlannerConfig& cfg) {
  for (EdgeStat& e : node.edges) {
    e.dng = {cfg.dng_mu0, cfg.dng_lambda, cfg.dng_alpha, cfg.dng_beta};
  }
}

// Observed return of each traversed edge, accumulated leaf to root, fed to
// the NormalGamma update. The deepest edge contributes the oracle value of
// the new frontier (or the exact reward at a terminal).
void dng_update_path(SearchTree& tree, const std::vector<DescentStep>& path,
                     const DescentResult& res, bool expanded) {
  double below;
  {
    const SearchNode& from = tree.node(res.from.state);
    const EdgeStat& last =
        from.edges[static_cast<std::size_t>(res.from.action)];
    if (last.child_terminal) {
      below = last.reward;
    } else if (expanded) {
      const SearchNode& leaf = tree.node(res.state);
      std::vector<double> means(leaf.edges.size());
      for (std::size_t a = 0; a < leaf.edges.size(); ++a) {
        means[a] = leaf.edges[a].prior_mean;
      }
      below = last.reward +
              means[static_cast<std::size_t>(argmax_index(means))];
    } else {
      below = last.prior_mean;  // horizon frontier, keep the oracle estimate
    }
  }
  for (std::size_t i = path.size(); i-- > 0;) {
    SearchNode& node = tree.node(path[i].state);
    EdgeStat& e = node.edges[static_cast<std::size_t>(path[i].action)];
    if (i + 1 < path.size()) {
      below = e.reward + below;
    }
    e.dng = dng_backup(e.dng, below);
  }
}

SearchOutcome finish_outcome(std::shared_ptr<SearchTree> tree,
                             std::vector<DescentStep> explored,
                             const PlannerConfig& cfg, int recommended) {
  SearchOutcome out;
  const SearchNode& root = tree->root_node();
  out.root_posteriors.reserve(root.edges.size());
  for (const EdgeStat& e : root.edges) out.root_posteriors.push_back(e.posterior);
  out.root_backed_values =
      branch_scores(*tree, CommitRule::mcts, 0.5, cfg.cdf_mode());
  out.explored_leaves = std::move(explored);
  out.tree_stats.node_count = tree->node_count();
  out.tree_stats.edge_count =
      tree->node_count() * root.edges.size();
  out.tree_stats.max_depth = tree->max_depth();
  out.recommended_action = recommended;
  out.tree = std::move(tree);
  return out;
}

// One descend / expand / backup iteration shared by both search loops.
void search_iteration(SearchTree& tree, const DecisionProcess& env,
                      const QueryProvider& oracle, const SelectFn& select,
                      const PlannerConfig& cfg, Rng& rng,
                      std::vector<DescentStep>& explored) {
  std::vector<DescentStep> path;
  std::vector<DescentStep>* path_ptr =
      cfg.algorithm == Algorithm::dng ? &path : nullptr;
  const DescentResult res = descend(tree, select, rng, path_ptr);
  bool expanded = false;
  if (res.expandable) {
    SearchNode& leaf = expand(tree, res.state, res.from, env, oracle);
    if (cfg.algorithm == Algorithm::dng) init_dng_stats(leaf, cfg);
    backup_path(tree, res.state);
    expanded = true;
  } else {
    // Terminal or horizon edge: the iteration consumes budget and re-backs
    // the unchanged path.
    backup_path(tree, res.from.state);
  }
  if (cfg.algorithm == Algorithm::dng) {
    dng_update_path(tree, path, res, expanded);
  }
  explored.push_back({res.from.state, res.from.action});
}

}  // namespace

SearchOutcome run_search(const DecisionProcess& env,
                         const QueryProvider& oracle, const PlannerConfig& cfg,
                         Rng& rng) {
  if (cfg.budget < 1) throw std::invalid_argument("run_search: budget < 1");
  if (cfg.algorithm == Algorithm::sh_puct) {
    return run_search_sh(env, oracle, cfg, rng);
  }
  Rng reseeded(cfg.seed);
  Rng& gen = cfg.deterministic_mode ? reseeded : rng;

  auto tree = std::make_shared<SearchTree>(env.horizon(), cfg.bins);
  SearchNode& root = expand(*tree, env.root(), std::nullopt, env, oracle);
  if (cfg.algorithm == Algorithm::dng) init_dng_stats(root, cfg);
  const SelectFn select = make_selector(cfg);

  std::vector<DescentStep> explored;
  explored.reserve(static_cast<std::size_t>(cfg.budget));
  for (int t = 1; t <= cfg.budget; ++t) {
    tree->iteration = t;
    search_iteration(*tree, env, oracle, select, cfg, gen, explored);
  }
  return finish_outcome(std::move(tree), std::move(explored), cfg, -1);
}

SearchOutcome run_search_custom(const DecisionProcess& env,
                                const QueryProvider& oracle, int budget,
                                int bins, const SelectFn& select, Rng& rng) {
  PlannerConfig cfg;
  cfg.budget = budget;
  cfg.bins = bins;
  auto tree = std::make_shared<SearchTree>(env.horizon(), bins);
  expand(*tree, env.root(), std::nullopt, env, oracle);
  std::vector<DescentStep> explored;
  explored.reserve(static_cast<std::size_t>(budget));
  for (int t = 1; t <= budget; ++t) {
    tree->iteration = t;
    search_iteration(*tree, env, oracle, select, cfg, rng, explored);
  }
  return finish_outcome(std::move(tree), std::move(explored), cfg, -1);
}

SearchOutcome run_search_sh(const DecisionProcess& env,
                            const QueryProvider& oracle,
                            const PlannerConfig& cfg, Rng& rng) {
  const int actions = env.action_count();
  if (cfg.budget < actions) {
    throw std::invalid_argument(
        "run_search_sh: budget must be at least the action count");
  }
  if (actions == 1) {
    PlannerConfig puct = cfg;
    puct.algorithm = Algorithm::puct;
    SearchOutcome out = run_search(env, oracle, puct, rng);
    out.recommended_action = 0;
    return out;
  }
  Rng reseeded(cfg.seed);
  Rng& gen = cfg.deterministic_mode ? reseeded : rng;

  auto tree = std::make_shared<SearchTree>(env.horizon(), cfg.bins);
  expand(*tree, env.root(), std::nullopt, env, oracle);

  // Below the root the walk follows the standard exploration rule; at the
  // root the arm under evaluation is forced.
  int forced_arm = 0;
  const StateRef root_state = env.root();
  const SelectFn select = [&forced_arm, &root_state, &cfg](
                              const SearchNode& n, Rng& r) {
    if (n.state == root_state) return forced_arm;
    (void)r;
    return select_puct(n, cfg.puct_c, cfg.softmax_temp);
  };

  std::vector<int> survivors(static_cast<std::size_t>(actions));
  for (int a = 0; a < actions; ++a) survivors[static_cast<std::size_t>(a)] = a;
  const int phases =
      static_cast<int>(std::ceil(std::log2(static_cast<double>(actions))));
  const int per_phase = cfg.budget / phases;

  std::vector<DescentStep> explored;
  explored.reserve(static_cast<std::size_t>(cfg.budget));
  int iteration = 0;
  for (int phase = 0; phase < phases; ++phase) {
    int phase_budget = per_phase;
    if (phase == phases - 1) phase_budget += cfg.budget - per_phase * phases;
    const int per_arm =
        phase_budget / static_cast<int>(survivors.size());
    for (int arm : survivors) {
      forced_arm = arm;
      for (int i = 0; i < per_arm; ++i) {
        tree->iteration = ++iteration;
        search_iteration(*tree, env, oracle, select, cfg, gen, explored);
      }
    }
    // Keep the better half by backed-up root value.
    std::stable_sort(survivors.begin(), survivors.end(), [&](int a, int b) {
      return tree->root_node().edges[static_cast<std::size_t>(a)].value_mean >
             tree->root_node().edges[static_cast<std::size_t>(b)].value_mean;
    });
    const std::size_t keep = (survivors.size() + 1) / 2;
    survivors.resize(std::max<std::size_t>(1, keep));
    std::sort(survivors.begin(), survivors.end());
  }
  std::vector<double> final_values;
  final_values.reserve(survivors.size());
  for (int a : survivors) {
    final_values.push_back(
        tree->root_node().edges[static_cast<std::size_t>(a)].value_mean);
  }
  const int recommended =
      survivors[static_cast<std::size_t>(argmax_index(final_values))];
  return finish_outcome(std::move(tree), std::move(explored), cfg,
                        recommended);
}

std::vector<double> branch_scores(const SearchTree& tree, CommitRule rule,
                                  double alpha, CdfMode mode) {
  // Best discovered branch per edge: rewards down the branch plus the
  // frontier edge's leaf score.
  struct Scorer {
    const SearchTree& tree;
    CommitRule rule;
    double alpha;
    CdfMode mode;

    double leaf_score(const EdgeStat& e) const {
      if (rule == CommitRule::quantile) {
        return quantile(e.posterior, alpha, mode);
      }
      return e.posterior.mean();
    }
    double edge_score(const EdgeStat& e) const {
      if (!e.child_terminal && tree.contains(e.child)) {
        const SearchNode& child = tree.node(e.child);
        double best = -std::numeric_limits<double>::infinity();
        for (const EdgeStat& ce : child.edges) {
          best = std::max(best, edge_score(ce));
        }
        return e.reward + best;
      }
      return leaf_score(e);
    }
  } scorer{tree, rule, alpha, mode};

  const SearchNode& root = tree.root_node();
  std::vector<double> scores(root.edges.size());
  for (std::size_t a = 0; a < root.edges.size(); ++a) {
    scores[a] = scorer.edge_score(root.edges[a]);
  }
  return scores;
}

int commit(const SearchOutcome& outcome, const PlannerConfig& cfg, Rng& rng) {
  const SearchTree& tree = *outcome.tree;
  switch (cfg.commitment) {
    case CommitRule::mcts: {
      if (outcome.recommended_action >= 0) return outcome.recommended_action;
      const std::vector<double> s =
          branch_scores(tree, CommitRule::mcts, 0.5, cfg.cdf_mode());
      return argmax_index(s);
    }
    case CommitRule::quantile: {
      const std::vector<double> s = branch_scores(
          tree, CommitRule::quantile, cfg.commit_alpha, cfg.cdf_mode());
      return argmax_index(s);
    }
    case CommitRule::softmax: {
      std::vector<double> s =
          branch_scores(tree, CommitRule::mcts, 0.5, cfg.cdf_mode());
      double hi = -std::numeric_limits<double>::infinity();
      for (double v : s) hi = std::max(hi, v / cfg.commit_temp);
      double sum = 0.0;
      for (double& v : s) {
        v = std::exp(v / cfg.commit_temp - hi);
        sum += v;
      }
      const double u = rng.uniform() * sum;
      double acc = 0.0;
      for (std::size_t a = 0; a < s.size(); ++a) {
        acc += s[a];
        if (u < acc) return static_cast<int>(a);
      }
      return static_cast<int>(s.size()) - 1;
    }
  }
  throw std::logic_error("commit: unhandled rule");
}

}  // namespace bayesplan
