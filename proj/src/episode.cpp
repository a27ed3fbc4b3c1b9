#include "bayesplan/episode.hpp"

#include <algorithm>
#include <numeric>

namespace bayesplan {

namespace {

constexpr std::uint64_t kSearchSalt = 0x73726368ULL;
constexpr std::uint64_t kCommitSalt = 0x636f6d74ULL;

int root_action_of(const SearchTree& tree, const DescentStep& leaf) {
  const SearchNode* node = &tree.node(leaf.state);
  int action = leaf.action;
  while (node->parent.has_value()) {
    action = node->parent->action;
    node = &tree.node(node->parent->state);
  }
  return action;
}

}  // namespace

std::vector<double> regret_trace(const SearchOutcome& outcome,
                                 const GroundTruthSource& gt,
                                 const DecisionProcess& env) {
  const std::vector<double> q0 = gt.gt_q(env.root());
  const double best = *std::max_element(q0.begin(), q0.end());
  std::vector<double> trace;
  trace.reserve(outcome.explored_leaves.size());
  for (const DescentStep& leaf : outcome.explored_leaves) {
    const int a_root = root_action_of(*outcome.tree, leaf);
    trace.push_back(best - q0[static_cast<std::size_t>(a_root)]);
  }
  return trace;
}

EpisodeResult online_episode(OnlineDomain& domain, const PlannerConfig& cfg,
                             const OracleFactory& oracle_factory, int step_cap,
                             std::uint64_t seed) {
  EpisodeResult result;
  result.seed = seed;
  double regret_sum = 0.0;
  std::size_t regret_n = 0;

  for (int step = 0; step < step_cap; ++step) {
    if (domain.at_goal()) {
      result.solved = true;
      break;
    }
    const std::unique_ptr<DecisionProcess> process = domain.planning_process();
    const std::shared_ptr<const QueryProvider> oracle =
        oracle_factory(*process);

    const std::uint64_t step_key = cfg.deterministic_mode
                                       ? seed
                                       : derive_seed({seed, static_cast<std::uint64_t>(step)});
    PlannerConfig step_cfg = cfg;
    step_cfg.seed = derive_seed({step_key, kSearchSalt});
    Rng search_rng(step_cfg.seed);
    SearchOutcome outcome =
        cfg.algorithm == Algorithm::sh_puct
            ? run_search_sh(*process, *oracle, step_cfg, search_rng)
            : run_search(*process, *oracle, step_cfg, search_rng);

    Rng commit_rng(derive_seed({step_key, kCommitSalt}));
    const int action = commit(outcome, step_cfg, commit_rng);

    StepSummary summary;
    summary.committed = action;
    summary.iterations = outcome.explored_leaves.size();
    summary.nodes = outcome.tree_stats.node_count;
    summary.max_depth = outcome.tree_stats.max_depth;
    summary.root_value =
        outcome.root_backed_values[static_cast<std::size_t>(action)];
    if (const auto* gt = dynamic_cast<const GroundTruthSource*>(process.get())) {
      outcome.regret_trace = regret_trace(outcome, *gt, *process);
      const std::vector<double>& trace = outcome.regret_trace;
      summary.mean_regret =
          trace.empty()
              ? 0.0
              : std::accumulate(trace.begin(), trace.end(), 0.0) /
                    static_cast<double>(trace.size());
      regret_sum += std::accumulate(trace.begin(), trace.end(), 0.0);
      regret_n += trace.size();
    }
    result.per_step.push_back(summary);
    result.committed_actions.push_back(action);
    domain.advance(action);
    result.steps_taken = step + 1;
  }
  if (!result.solved && domain.at_goal()) {
    // Goal reached exactly at the cap.
    result.solved = true;
  }
  result.mean_regret =
      regret_n == 0 ? 0.0 : regret_sum / static_cast<double>(regret_n);
  return result;
}

MazeDomain::MazeDomain(std::shared_ptr<const MazeInstance> maze, int horizon)
    : maze_(std::move(maze)), current_(maze_->start), horizon_(horizon) {
  distances_ = maze_goal_distances(maze_);
}

std::unique_ptr<DecisionProcess> MazeDomain::planning_process() const {
  return std::make_unique<MazeProcess>(maze_, current_, horizon_, distances_);
}

void MazeDomain::advance(int action) {
  current_ = maze_move(*maze_, current_, action);
}

bool MazeDomain::at_goal() const { return current_ == maze_->goal; }

}  // namespace bayesplan
