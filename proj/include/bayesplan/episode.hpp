#pragma once

#include <functional>
#include <memory>
#include <vector>

#include "bayesplan/maze.hpp"
#include "bayesplan/planners.hpp"

namespace bayesplan {

// An environment shell whose current state advances as actions are
// committed; each time step plans over a fresh decision process rooted at
// the current state.
class OnlineDomain {
 public:
  virtual ~OnlineDomain() = default;

  virtual std::unique_ptr<DecisionProcess> planning_process() const = 0;
  virtual void advance(int action) = 0;
  virtual bool at_goal() const = 0;
};

struct StepSummary {
  int committed = 0;
  std::size_t iterations = 0;
  std::size_t nodes = 0;
  int max_depth = 0;
  double root_value = 0.0;
  double mean_regret = 0.0;
};

struct EpisodeResult {
  bool solved = false;
  int steps_taken = 0;
  std::vector<int> committed_actions;
  std::vector<StepSummary> per_step;
  std::uint64_t seed = 0;
  double mean_regret = 0.0;  // over all search iterations of the episode
};

// Builds the per-step query provider for the process of the current step.
using OracleFactory = std::function<std::shared_ptr<const QueryProvider>(
    const DecisionProcess&)>;

// Runs up to `step_cap` time steps of plan / commit / advance. Each step's
// search derives its seed from (seed, step); in deterministic mode every
// step re-uses the same seed, so a stochastic planner repeats its decisions.
// Regret is measured whenever the step's process exposes ground truth.
EpisodeResult online_episode(OnlineDomain& domain, const PlannerConfig& cfg,
                             const OracleFactory& oracle_factory, int step_cap,
                             std::uint64_t seed);

// Instantaneous root regret of every explored leaf of one search:
// Q_gt(s0, A*) - Q_gt(s0, A_root(z_t)), using the tree's parent links to
// project each explored edge to its root action.
std::vector<double> regret_trace(const SearchOutcome& outcome,
                                 const GroundTruthSource& gt,
                                 const DecisionProcess& env);

// Maze-backed online domain.
class MazeDomain : public OnlineDomain {
 public:
  MazeDomain(std::shared_ptr<const MazeInstance> maze, int horizon = 50);

  std::unique_ptr<DecisionProcess> planning_process() const override;
  void advance(int action) override;
  bool at_goal() const override;

  int current_tile() const { return current_; }
  const std::shared_ptr<const MazeInstance>& maze() const { return maze_; }

 private:
  std::shared_ptr<const MazeInstance> maze_;
  int current_;
  int horizon_;
  std::shared_ptr<const std::vector<int>> distances_;
};

}  // namespace bayesplan
