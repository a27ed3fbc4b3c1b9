#pragma once

#include <string>

#include "bayesplan/search_tree.hpp"

namespace bayesplan {

// JSON serialization of a discovered tree: nodes with depth, visit counts
// and parent links; edges with rewards, posterior mean/std, backed values
// and visit counts. Deterministic output for a given tree.
std::string dump_tree_json(const SearchTree& tree);

}  // namespace bayesplan
