#pragma once

#include <cstdint>
#include <vector>

#include "bayesplan/decision_process.hpp"
#include "bayesplan/rng.hpp"

namespace bayesplan {

// Explicit full k-ary tree of fixed depth with one reward per edge. States
// use heap indexing: the root is 0 and child(i, a) = i * branching + 1 + a,
// which is also breadth-first order. Edges are identified with their child
// state minus one, so edge indices run over 0 .. edge_count - 1 in
// breadth-first order.
class TabularTreeProcess : public DecisionProcess, public GroundTruthSource {
 public:
  // terminal_leaves: whether depth-H states are terminal (true decision
  // processes of depth H) or plain horizon-capped frontier states.
  TabularTreeProcess(int depth, int branching,
                     std::vector<double> edge_rewards, bool terminal_leaves);

  StateRef root() const override { return {0, 0, 0}; }
  int action_count() const override { return branching_; }
  std::pair<StateRef, double> step(const StateRef& state,
                                   int action) const override;
  bool is_terminal(const StateRef& state) const override;
  int horizon() const override { return depth_; }
  double reward_bound() const override { return reward_bound_; }

  std::vector<double> gt_q(const StateRef& state) const override;

  int depth() const { return depth_; }
  std::uint64_t state_count() const { return state_count_; }
  std::uint64_t edge_count() const { return state_count_ - 1; }
  double edge_reward(std::uint64_t edge) const {
    return rewards_[static_cast<std::size_t>(edge)];
  }
  std::uint64_t child_state(std::uint64_t state, int action) const {
    return state * static_cast<std::uint64_t>(branching_) + 1 +
           static_cast<std::uint64_t>(action);
  }
  std::uint64_t parent_state(std::uint64_t state) const {
    return (state - 1) / static_cast<std::uint64_t>(branching_);
  }

  // The root action whose subtree contains the given edge.
  int root_action_of_edge(std::uint64_t edge) const;

  static std::uint64_t count_states(int depth, int branching);

 private:
  int depth_;
  int branching_;
  bool terminal_leaves_;
  std::uint64_t state_count_;
  std::vector<double> rewards_;      // per edge
  std::vector<double> state_value_;  // exact optimal value-to-go per state
  double reward_bound_;
};

// A family of trees with exactly one unit-reward edge, drawn from a prior
// over edge positions.
struct NeedleFamily {
  int depth = 3;
  int branching = 2;
  std::vector<double> prior;  // over edges, sums to 1
};

NeedleFamily make_needle_family(int depth, int branching);  // uniform prior
NeedleFamily make_needle_family_concentrated(int depth, int branching,
                                             double mass,
                                             std::uint64_t edge);

std::uint64_t sample_needle_edge(const NeedleFamily& family, Rng& rng);

// The tree with reward 1 on the given edge and 0 elsewhere; depth-H states
// are terminal.
TabularTreeProcess make_needle_process(const NeedleFamily& family,
                                       std::uint64_t needle_edge);

// Zero-reward k-ary tree whose depth-H states are not terminal; frontier
// edges keep their oracle posteriors indefinitely.
TabularTreeProcess make_uniform_tree(int depth, int branching);

}  // namespace bayesplan
