#pragma once

#include <memory>
#include <string>

#include "bayesplan/search_tree.hpp"

namespace bayesplan {

enum class Algorithm { tsts, bts, bayes_ucb, bayes_uct2, puct, sh_puct, dng };
enum class CommitRule { mcts, quantile, softmax };

std::string algorithm_name(Algorithm a);
Algorithm algorithm_from_name(const std::string& name);
std::string commit_rule_name(CommitRule c);
CommitRule commit_rule_from_name(const std::string& name);

struct PlannerConfig {
  Algorithm algorithm = Algorithm::bts;
  int budget = 50;              // T, tree-search iterations per planning call
  double alpha0 = 0.5;          // initial quantile of the schedule
  double beta = 3.0;            // schedule rate, or the Bayes-UCB beta
  double puct_c = 1.0;          // exploration constant
  double softmax_temp = 2.0;    // temperature of the search prior
  CommitRule commitment = CommitRule::mcts;
  double commit_alpha = 0.25;   // quantile commitment level
  double commit_temp = 2.0;     // softmax commitment temperature
  std::uint64_t seed = 0;
  bool deterministic_mode = false;  // re-seed identically at every call
  int bins = kDefaultBins;          // M
  bool exact_cdf = false;           // exact CDF path for quantiles/sampling
  double dng_mu0 = 0.0;
  double dng_lambda = 0.001;
  double dng_alpha = 1.0;
  double dng_beta = 100.0;
  std::string name;  // label used in results; algorithm name when empty

  CdfMode cdf_mode() const {
    return exact_cdf ? CdfMode::exact_cdf : CdfMode::gaussian_approx;
  }
  std::string label() const { return name.empty() ? algorithm_name(algorithm) : name; }
  bool stochastic() const {
    return algorithm == Algorithm::tsts || algorithm == Algorithm::sh_puct ||
           algorithm == Algorithm::dng || commitment == CommitRule::softmax;
  }
};

// Per-algorithm defaults from the hyper-parameter sweeps: BTS alpha0 = 0.5,
// beta = 3; Bayes-UCB beta = 0.5; search softmax temperature 2.0; DNG
// lambda = 0.001, beta = 100.
PlannerConfig default_config(Algorithm algorithm);

// --- Selection rules ------------------------------------------------------

// Thompson sampling: one draw per edge posterior, argmax.
int select_tsts(const SearchNode& node, Rng& rng,
                CdfMode mode = CdfMode::gaussian_approx);

// Quantile schedule alpha(s) = 1 - (1 - alpha0) * exp(-(N(s) - 1) / beta).
double bts_quantile_level(int visit_count, double alpha0, double beta);

// Argmax of the per-edge quantile at the node's schedule level. The node's
// visit count must already include the current visit.
int select_bts(const SearchNode& node, double alpha0, double beta,
               CdfMode mode = CdfMode::gaussian_approx);

// Argmax of per-edge quantiles at level max(0.001, 1 - beta / N(s)).
int select_bayes_ucb(const SearchNode& node, double beta,
                     CdfMode mode = CdfMode::gaussian_approx);

// Argmax of mean + sqrt(2 ln N(s) * variance).
int select_bayes_uct2(const SearchNode& node);
double bayes_uct2_score(double mean, double var, int node_visits);

// Argmax of Q(s,a) + c * prior(a) * sqrt(N(s)) / (1 + N(s,a)), with the
// prior a softmax of the oracle means and Q the scalar max-backup value.
int select_puct(const SearchNode& node, double c, double temp);
std::vector<double> puct_priors(const SearchNode& node, double temp);

// One NormalGamma posterior update with observed return r; the beta and mu0
// updates use the pre-update lambda and mu0.
DngStat dng_backup(const DngStat& stat, double r);

// Per edge: tau ~ Gamma(alpha, rate beta), mu ~ N(mu0, 1/(lambda tau));
// argmax of the sampled mu. Unvisited edges score their oracle mean.
int select_dng(const SearchNode& node, Rng& rng);

SelectFn make_selector(const PlannerConfig& cfg);

// --- Search loops ---------------------------------------------------------

struct TreeStats {
  std::size_t node_count = 0;
  std::size_t edge_count = 0;
  int max_depth = 0;
};

struct SearchOutcome {
  std::vector<Posterior> root_posteriors;
  std::vector<double> root_backed_values;  // best-branch expected returns
  std::vector<DescentStep> explored_leaves;  // z_t per iteration
  TreeStats tree_stats;
  std::vector<double> regret_trace;  // filled by the harness when GT exists
  int recommended_action = -1;       // set by sequential halving
  std::shared_ptr<const SearchTree> tree;
};

// Expands the root, then runs budget iterations of descend / expand /
// backup. In deterministic mode the generator is re-seeded from the config
// at every call, making repeated searches identical across time steps.
SearchOutcome run_search(const DecisionProcess& env,
                         const QueryProvider& oracle, const PlannerConfig& cfg,
                         Rng& rng);

// Sequential halving over root actions; iterations below the root follow
// the standard exploration rule. Requires budget >= action count.
SearchOutcome run_search_sh(const DecisionProcess& env,
                            const QueryProvider& oracle,
                            const PlannerConfig& cfg, Rng& rng);

// Plain descend / expand / backup loop with an explicit selection rule;
// the building block for ad-hoc studies and tests.
SearchOutcome run_search_custom(const DecisionProcess& env,
                                const QueryProvider& oracle, int budget,
                                int bins, const SelectFn& select, Rng& rng);

// --- Action commitment ----------------------------------------------------

// Best discovered branch per root action: sum of edge rewards down the
// branch plus leaf_score at the frontier edge. leaf_score is the posterior
// mean for the expected-return rule and an alpha-quantile for the
// risk-sensitive rule.
std::vector<double> branch_scores(const SearchTree& tree, CommitRule rule,
                                  double alpha, CdfMode mode);

// Picks the action to execute in the environment after a search.
int commit(const SearchOutcome& outcome, const PlannerConfig& cfg, Rng& rng);

}  // namespace bayesplan
