#include "bayesplan/tree_dump.hpp"

#include <algorithm>
#include <cmath>

#include <json.hpp>

namespace bayesplan {

std::string dump_tree_json(const SearchTree& tree) {
  using nlohmann::json;

  std::vector<const SearchNode*> nodes;
  tree.for_each_node([&](const SearchNode& n) { nodes.push_back(&n); });
  std::sort(nodes.begin(), nodes.end(),
            [](const SearchNode* a, const SearchNode* b) {
              return a->state.id < b->state.id;
            });

  json out;
  out["root"] = tree.root().id;
  out["horizon"] = tree.horizon();
  out["bins"] = tree.bins();
  out["node_count"] = tree.node_count();
  out["max_depth"] = tree.max_depth();
  json jnodes = json::array();
  for (const SearchNode* n : nodes) {
    json jn;
    jn["id"] = n->state.id;
    jn["depth"] = n->state.depth;
    jn["visits"] = n->visit_count;
    if (n->parent.has_value()) {
      jn["parent"] = {{"id", n->parent->state.id},
                      {"action", n->parent->action}};
    } else {
      jn["parent"] = nullptr;
    }
    json jedges = json::array();
    for (std::size_t a = 0; a < n->edges.size(); ++a) {
      const EdgeStat& e = n->edges[a];
      json je;
      je["action"] = a;
      je["reward"] = e.reward;
      je["posterior_mean"] = e.posterior.mean();
      je["posterior_std"] = std::sqrt(e.posterior.var());
      je["value"] = e.value_mean;
      je["visits"] = e.visit_count;
      je["child"] = e.child.id;
      je["terminal"] = e.child_terminal;
      je["expanded"] = !e.child_terminal && tree.contains(e.child);
      jedges.push_back(std::move(je));
    }
    jn["edges"] = std::move(jedges);
    jnodes.push_back(std::move(jn));
  }
  out["nodes"] = std::move(jnodes);
  return out.dump(2);
}

}  // namespace bayesplan
