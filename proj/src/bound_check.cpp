#include "bayesplan/bound_check.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <stdexcept>

#include "bayesplan/episode.hpp"
#include "bayesplan/oracle.hpp"

namespace bayesplan {

BoundSelector bound_selector_from_name(const std::string& name) {
  if (name == "tsts") return BoundSelector::tsts;
  if (name == "agnostic") return BoundSelector::agnostic;
  if (name == "adversarial") return BoundSelector::adversarial;
  throw std::invalid_argument("unknown bound-check selector: " + name);
}

std::vector<double> agnostic_regret_trace(const TabularTreeProcess& env) {
  const std::vector<double> q0 = env.gt_q(env.root());
  const double best = *std::max_element(q0.begin(), q0.end());
  std::vector<double> trace;
  trace.reserve(static_cast<std::size_t>(env.edge_count()));
  for (std::uint64_t e = 0; e < env.edge_count(); ++e) {
    const int a = env.root_action_of_edge(e);
    trace.push_back(best - q0[static_cast<std::size_t>(a)]);
  }
  return trace;
}

BoundCheckReport bound_check(const NeedleFamily& family,
                             BoundSelector selector, int budget,
                             int repetitions, std::uint64_t seed) {
  BoundCheckReport report;
  report.entropy = prior_entropy(family.prior);
  report.depth = family.depth;
  report.z_count = family.prior.size();
  if (selector == BoundSelector::agnostic &&
      budget > static_cast<int>(report.z_count)) {
    throw std::invalid_argument(
        "bound_check: agnostic order is exhausted past |Z| iterations");
  }

  const NeedlePriorProvider provider(family);
  const SelectFn worst_mean = [](const SearchNode& node, Rng&) {
    std::vector<double> neg(node.edges.size());
    for (std::size_t a = 0; a < node.edges.size(); ++a) {
      neg[a] = -node.edges[a].posterior.mean();
    }
    return argmax_index(neg);
  };

  std::vector<double> acc(static_cast<std::size_t>(budget), 0.0);
  for (int rep = 0; rep < repetitions; ++rep) {
    Rng rng(derive_seed({seed, static_cast<std::uint64_t>(rep)}));
    const std::uint64_t needle = sample_needle_edge(family, rng);
    const TabularTreeProcess env = make_needle_process(family, needle);

    std::vector<double> trace;
    if (selector == BoundSelector::agnostic) {
      trace = agnostic_regret_trace(env);
    } else {
      SearchOutcome outcome;
      if (selector == BoundSelector::tsts) {
        PlannerConfig cfg = default_config(Algorithm::tsts);
        cfg.budget = budget;
        outcome = run_search(env, provider, cfg, rng);
      } else {
        outcome = run_search_custom(env, provider, budget, kDefaultBins,
                                    worst_mean, rng);
      }
      trace = regret_trace(outcome, env, env);
    }
    double cum = 0.0;
    for (int t = 0; t < budget; ++t) {
      if (t < static_cast<int>(trace.size())) cum += trace[static_cast<std::size_t>(t)];
      acc[static_cast<std::size_t>(t)] += cum;
    }
  }

  const double r_max = 1.0;
  report.rows.reserve(static_cast<std::size_t>(budget));
  report.pass = true;
  for (int t = 1; t <= budget; ++t) {
    BoundCheckRow row;
    row.t = t;
    row.empirical =
        acc[static_cast<std::size_t>(t - 1)] / static_cast<double>(repetitions);
    row.bound = family.depth * r_max *
                std::sqrt(0.5 * static_cast<double>(report.z_count) *
                          report.entropy * t);
    if (row.empirical > row.bound + 1e-9) report.pass = false;
    report.rows.push_back(row);
  }
  return report;
}

std::string format_bound_report(const BoundCheckReport& report) {
  std::ostringstream out;
  out << "needle family: depth " << report.depth << ", |Z| " << report.z_count
      << ", prior entropy " << report.entropy << " nats\n";
  out << "    t   empirical       bound\n";
  for (const BoundCheckRow& row : report.rows) {
    char line[96];
    std::snprintf(line, sizeof(line), "%5d  %10.4f  %10.4f\n", row.t,
                  row.empirical, row.bound);
    out << line;
  }
  out << (report.pass ? "PASS" : "FAIL")
      << ": empirical mean regret vs bound at every t\n";
  return out.str();
}

}  // namespace bayesplan
