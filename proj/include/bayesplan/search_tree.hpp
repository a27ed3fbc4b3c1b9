#pragma once

#include <functional>
#include <optional>
#include <unordered_map>
#include <vector>

#include "bayesplan/decision_process.hpp"
#include "bayesplan/oracle.hpp"
#include "bayesplan/posterior.hpp"
#include "bayesplan/rng.hpp"

namespace bayesplan {

struct ParentLink {
  StateRef state;
  int action = 0;
};

// NormalGamma sufficient statistics, maintained per edge by the
// Dirichlet-NormalGamma baseline.
struct DngStat {
  double mu0 = 0.0;
  double lambda = 0.001;
  double alpha = 1.0;
  double beta = 100.0;
};

struct EdgeStat {
  double reward = 0.0;        // r(s, a)
  Posterior posterior;        // P(Q(s, a))
  double prior_mean = 0.0;    // oracle mean at expansion, kept for priors
  double value_mean = 0.0;    // scalar max-backup of Q(s, a)
  StateRef child;
  bool child_terminal = false;
  int visit_count = 0;        // N(s, a)
  DngStat dng;
};

struct SearchNode {
  StateRef state;
  std::vector<EdgeStat> edges;
  int visit_count = 0;  // N(s)
  std::optional<ParentLink> parent;
};

// The discovered tree. Nodes exist for every expanded (known) state;
// frontier, terminal and horizon states appear only as edge children.
class SearchTree {
 public:
  SearchTree(int horizon, int bins) : horizon_(horizon), bins_(bins) {}

  bool contains(const StateRef& state) const {
    return nodes_.contains(state.id);
  }
  SearchNode& node(const StateRef& state);
  const SearchNode& node(const StateRef& state) const;
  SearchNode& root_node() { return node(root_); }
  const SearchNode& root_node() const { return node(root_); }

  const StateRef& root() const { return root_; }
  int horizon() const { return horizon_; }
  int bins() const { return bins_; }
  std::size_t node_count() const { return nodes_.size(); }
  int max_depth() const { return max_depth_; }

  int iteration = 0;

  template <typename Fn>
  void for_each_node(Fn&& fn) const {
    for (const auto& [id, node] : nodes_) fn(node);
  }

 private:
  friend SearchNode& expand(SearchTree&, const StateRef&,
                            const std::optional<ParentLink>&,
                            const DecisionProcess&, const QueryProvider&);

  std::unordered_map<std::uint64_t, SearchNode> nodes_;
  StateRef root_;
  int horizon_;
  int bins_;
  int max_depth_ = 0;
  bool has_root_ = false;
};

// Adds `state` to the tree with one initialized edge per action: reward and
// child from the environment, posterior from the oracle. Edges whose child
// is terminal carry a point mass at the reward (no future return). The root
// is expanded with an empty parent link.
SearchNode& expand(SearchTree& tree, const StateRef& state,
                   const std::optional<ParentLink>& parent,
                   const DecisionProcess& env, const QueryProvider& oracle);

// Replaces every ancestor edge posterior on the path from `state` to the
// root, deepest first, with shift(max over the child's edges, edge reward).
// The scalar value_mean is folded the same way. Backing up twice without a
// new expansion is a no-op.
void backup_path(SearchTree& tree, const StateRef& state);

// Action choice at a node during descent.
using SelectFn = std::function<int(const SearchNode&, Rng&)>;

struct DescentStep {
  StateRef state;
  int action = 0;
};

struct DescentResult {
  StateRef state;       // frontier state the walk stopped at
  ParentLink from;      // known node and action that led there
  bool expandable = false;  // false for terminal or horizon children
};

// Walks from the root, incrementing visit counts before each selection,
// until the selected edge leaves the known set (expandable), hits a
// terminal child, or hits the depth cap. When `path` is given, every
// traversed (state, action) is appended.
DescentResult descend(SearchTree& tree, const SelectFn& select, Rng& rng,
                      std::vector<DescentStep>* path = nullptr);

// First index attaining the maximum; deterministic tie-break.
int argmax_index(std::span<const double> values);

}  // namespace bayesplan
