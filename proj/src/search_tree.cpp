#include "bayesplan/search_tree.hpp"

#include <limits>
#include <stdexcept>

namespace bayesplan {

int argmax_index(std::span<const double> values) {
  int best = 0;
  double best_v = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (values[i] > best_v) {
      best_v = values[i];
      best = static_cast<int>(i);
    }
  }
  return best;
}

SearchNode& SearchTree::node(const StateRef& state) {
  const auto it = nodes_.find(state.id);
  if (it == nodes_.end()) {
    throw std::logic_error("SearchTree::node: state not in known set");
  }
  return it->second;
}

const SearchNode& SearchTree::node(const StateRef& state) const {
  const auto it = nodes_.find(state.id);
  if (it == nodes_.end()) {
    throw std::logic_error("SearchTree::node: state not in known set");
  }
  return it->second;
}

SearchNode& expand(SearchTree& tree, const StateRef& state,
                   const std::optional<ParentLink>& parent,
                   const DecisionProcess& env, const QueryProvider& oracle) {
  if (tree.contains(state)) {
    throw std::logic_error("expand: state already in known set");
  }
  if (state.depth >= tree.horizon() || env.is_terminal(state)) {
    throw std::logic_error("expand: terminal or horizon state");
  }
  if (parent.has_value()) {
    // The parent must be known and must actually lead here.
    const SearchNode& p = tree.node(parent->state);
    if (!(p.edges[static_cast<std::size_t>(parent->action)].child == state)) {
      throw std::logic_error("expand: parent edge does not reach state");
    }
  } else if (tree.has_root_) {
    throw std::logic_error("expand: tree already has a root");
  }

  SearchNode node;
  node.state = state;
  node.parent = parent;
  std::vector<Posterior> priors = oracle.query(state);
  const int actions = env.action_count();
  node.edges.resize(static_cast<std::size_t>(actions));
  for (int a = 0; a < actions; ++a) {
    EdgeStat& e = node.edges[static_cast<std::size_t>(a)];
    auto [child, reward] = env.step(state, a);
    e.reward = reward;
    e.child = child;
    e.child_terminal = env.is_terminal(child);
    if (e.child_terminal) {
      // Fully observed: the future return past a terminal state is zero.
      e.posterior = Posterior::point_mass(reward);
    } else {
      e.posterior = std::move(priors[static_cast<std::size_t>(a)]);
    }
    e.prior_mean = e.posterior.mean();
    e.value_mean = e.prior_mean;
  }
  if (!parent.has_value()) {
    tree.root_ = state;
    tree.has_root_ = true;
  }
  tree.max_depth_ = std::max(tree.max_depth_, state.depth);
  return tree.nodes_.emplace(state.id, std::move(node)).first->second;
}

void backup_path(SearchTree& tree, const StateRef& state) {
  const SearchNode* node = &tree.node(state);
  std::vector<Posterior> child_posteriors;
  std::vector<double> child_values;
  while (node->parent.has_value()) {
    const ParentLink link = *node->parent;
    child_posteriors.clear();
    child_values.clear();
    child_posteriors.reserve(node->edges.size());
    for (const EdgeStat& e : node->edges) {
      child_posteriors.push_back(e.posterior);
      child_values.push_back(e.value_mean);
    }
    SearchNode& parent = tree.node(link.state);
    EdgeStat& edge = parent.edges[static_cast<std::size_t>(link.action)];
    edge.posterior =
        shift(max_of_independent(child_posteriors, tree.bins()), edge.reward);
    edge.value_mean =
        edge.reward + child_values[static_cast<std::size_t>(argmax_index(
                          child_values))];
    node = &parent;
  }
}

DescentResult descend(SearchTree& tree, const SelectFn& select, Rng& rng,
                      std::vector<DescentStep>* path) {
  SearchNode* node = &tree.root_node();
  for (;;) {
    node->visit_count += 1;
    const int a = select(*node, rng);
    EdgeStat& edge = node->edges[static_cast<std::size_t>(a)];
    edge.visit_count += 1;
    if (path != nullptr) path->push_back({node->state, a});
    const StateRef child = edge.child;
    if (edge.child_terminal || child.depth >= tree.horizon()) {
      return {child, {node->state, a}, false};
    }
    if (!tree.contains(child)) {
      return {child, {node->state, a}, true};
    }
    node = &tree.node(child);
  }
}

}  // namespace bayesplan
