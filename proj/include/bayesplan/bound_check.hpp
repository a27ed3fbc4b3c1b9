#pragma once

#include <string>
#include <vector>

#include "bayesplan/planners.hpp"
#include "bayesplan/tree_env.hpp"

namespace bayesplan {

enum class BoundSelector {
  tsts,        // Thompson sampling over the needle prior
  agnostic,    // fixed breadth-first exploration order, ignores the prior
  adversarial  // always descends toward the lowest posterior mean
};

BoundSelector bound_selector_from_name(const std::string& name);

struct BoundCheckRow {
  int t = 0;
  double empirical = 0.0;  // mean cumulative regret at budget t
  double bound = 0.0;      // H * R_max * sqrt(0.5 * |Z| * H(z*) * t)
};

struct BoundCheckReport {
  std::vector<BoundCheckRow> rows;
  double entropy = 0.0;      // H(z*) of the needle prior, nats
  std::uint64_t z_count = 0; // |Z|
  int depth = 0;
  bool pass = false;         // empirical <= bound at every t
};

// Samples trees from the needle prior, runs the chosen leaf-selection rule
// for `budget` iterations on each, and compares the mean cumulative regret
// at every t in 1..budget against the information-theoretic bound.
BoundCheckReport bound_check(const NeedleFamily& family,
                             BoundSelector selector, int budget,
                             int repetitions, std::uint64_t seed);

std::string format_bound_report(const BoundCheckReport& report);

// Explored-edge regret of the agnostic search on one sampled tree: edges
// visited in breadth-first order, each off-branch edge costing the root
// value gap. Exposed for the calibration studies.
std::vector<double> agnostic_regret_trace(const TabularTreeProcess& env);

}  // namespace bayesplan
