#include <doctest.h>

#include <cmath>
#include <map>

#include "bayesplan/maze.hpp"
#include "bayesplan/normal.hpp"
#include "bayesplan/planners.hpp"
#include "bayesplan/search_tree.hpp"
#include "test_support.hpp"

using namespace bayesplan;

namespace {

const char* kNearGoalMaze =
    "#####\n"
    "#S.G#\n"
    "#####\n";

// Recomputes every internal edge posterior from scratch, bottom-up, and
// compares bit-exactly against the incrementally maintained one.
void check_fold_equals_incremental(const SearchTree& tree) {
  std::vector<const SearchNode*> nodes;
  tree.for_each_node([&](const SearchNode& n) { nodes.push_back(&n); });
  std::sort(nodes.begin(), nodes.end(),
            [](const SearchNode* a, const SearchNode* b) {
              return a->state.depth > b->state.depth;
            });
  std::map<std::pair<std::uint64_t, int>, Posterior> fold;
  auto edge_posterior = [&](const SearchNode& n, int a) -> Posterior {
    const auto it = fold.find({n.state.id, a});
    if (it != fold.end()) return it->second;
    return n.edges[static_cast<std::size_t>(a)].posterior;
  };
  for (const SearchNode* n : nodes) {
    if (!n->parent.has_value()) continue;
    std::vector<Posterior> children;
    for (std::size_t a = 0; a < n->edges.size(); ++a) {
      children.push_back(edge_posterior(*n, static_cast<int>(a)));
    }
    const SearchNode& parent = tree.node(n->parent->state);
    const EdgeStat& edge =
        parent.edges[static_cast<std::size_t>(n->parent->action)];
    const Posterior rebuilt =
        shift(max_of_independent(children, tree.bins()), edge.reward);
    fold.insert_or_assign({n->parent->state.id, n->parent->action}, rebuilt);
    REQUIRE(rebuilt.is_gaussian() == edge.posterior.is_gaussian());
    if (rebuilt.is_gaussian()) {
      CHECK(rebuilt.gaussian_mean() == edge.posterior.gaussian_mean());
      CHECK(rebuilt.gaussian_std() == edge.posterior.gaussian_std());
    } else {
      REQUIRE(rebuilt.bins().size() == edge.posterior.bins().size());
      for (std::size_t i = 0; i < rebuilt.bins().size(); ++i) {
        CHECK(rebuilt.bins()[i] == edge.posterior.bins()[i]);
        CHECK(rebuilt.cdf()[i] == edge.posterior.cdf()[i]);
      }
    }
  }
}

}  // namespace

TEST_CASE("expand initializes edges from the environment and oracle") {
  auto maze =
      std::make_shared<const MazeInstance>(maze_from_text(kNearGoalMaze));
  MazeProcess env(maze, maze->start, 50);

  SUBCASE("four edges with oracle posteriors at the root") {
    TableProvider oracle(4, Posterior::gaussian(-3.0, 1.0));
    SearchTree tree(env.horizon(), 50);
    const SearchNode& root =
        expand(tree, env.root(), std::nullopt, env, oracle);
    REQUIRE(root.edges.size() == 4);
    CHECK(tree.node_count() == 1);
    for (int a : {kUp, kDown, kLeft}) {
      CHECK(root.edges[static_cast<std::size_t>(a)].posterior.is_gaussian());
      CHECK(root.edges[static_cast<std::size_t>(a)].posterior.mean() == -3.0);
      CHECK(root.edges[static_cast<std::size_t>(a)].reward == -1.0);
    }
  }

  SUBCASE("terminal children carry a point mass at the reward") {
    auto pred = std::make_shared<const CorruptedPredictor>(env, env, 0.3, 5);
    const auto oracle = gt_sigma_query(pred);
    SearchTree tree(env.horizon(), 50);
    expand(tree, env.root(), std::nullopt, env, *oracle);
    const auto [mid, r] = env.step(env.root(), kRight);
    (void)r;
    const SearchNode& node =
        expand(tree, mid, ParentLink{env.root(), kRight}, env, *oracle);
    // One step from the goal: the goal edge is terminal with value -1.
    const EdgeStat& toward = node.edges[kRight];
    CHECK(toward.child_terminal);
    CHECK(toward.posterior.is_point_mass());
    CHECK(toward.posterior.mean() == -1.0);
  }

  SUBCASE("re-expansion is a logic error") {
    TableProvider oracle(4);
    SearchTree tree(env.horizon(), 50);
    expand(tree, env.root(), std::nullopt, env, oracle);
    CHECK_THROWS_AS(expand(tree, env.root(), std::nullopt, env, oracle),
                    std::logic_error);
  }
}

TEST_CASE("backup of point masses is a shifted max of constants") {
  const TabularTreeProcess env = make_uniform_tree(1, 2);
  TableProvider oracle(2, Posterior::point_mass(0.0));
  // Deepest edges are the frontier of the full tree; their posteriors come
  // straight from the oracle at expansion.
  oracle.set(1, 0, Posterior::point_mass(2.0));
  oracle.set(1, 1, Posterior::point_mass(5.0));
  oracle.set(0, 0, Posterior::point_mass(1.0));

  // Depth-1 tree with a reward of 1 on the root edge needs a custom env.
  const TabularTreeProcess env2(2, 2, {1.0, 0.0, 2.0, 5.0, 0.0, 0.0},
                                /*terminal_leaves=*/false);
  SearchTree tree(env2.horizon(), 50);
  expand(tree, env2.root(), std::nullopt, env2, oracle);
  const StateRef s1{1, 1, 1};
  expand(tree, s1, ParentLink{env2.root(), 0}, env2, oracle);
  backup_path(tree, s1);

  const EdgeStat& root_edge = tree.root_node().edges[0];
  CHECK(root_edge.posterior.mean() == doctest::Approx(6.0).epsilon(1e-6));
  CHECK(root_edge.posterior.var() == doctest::Approx(0.0).epsilon(1e-9));
  CHECK(root_edge.value_mean == doctest::Approx(6.0));

  SUBCASE("backing up twice without new expansions is bit-identical") {
    const Posterior before = tree.root_node().edges[0].posterior;
    backup_path(tree, s1);
    const Posterior& after = tree.root_node().edges[0].posterior;
    REQUIRE(before.bins().size() == after.bins().size());
    for (std::size_t i = 0; i < before.bins().size(); ++i) {
      CHECK(before.bins()[i] == after.bins()[i]);
      CHECK(before.cdf()[i] == after.cdf()[i]);
    }
  }
}

TEST_CASE("backup of two standard gaussians reaches the root") {
  const auto fix = test::make_canonical_depth2(
      {{0.0, 1.0}, {0.0, 1.0}, {-100.0, 0.1}, {-100.0, 0.1}}, 50);
  const EdgeStat& left = fix.tree->root_node().edges[0];
  CHECK(left.posterior.mean() ==
        doctest::Approx(1.0 / std::sqrt(M_PI)).epsilon(0.02 * std::sqrt(M_PI)));
}

TEST_CASE("descend") {
  SUBCASE("zero-variance posteriors give a deterministic greedy path") {
    const auto fix = test::make_canonical_depth2(
        {{0.3, 0.0}, {0.1, 0.0}, {0.9, 0.0}, {0.2, 0.0}}, 50);
    Rng rng(1);
    for (int i = 0; i < 5; ++i) {
      std::vector<DescentStep> path;
      const DescentResult res = descend(
          *fix.tree,
          [](const SearchNode& n, Rng& r) { return select_tsts(n, r); }, rng,
          &path);
      CHECK_FALSE(res.expandable);  // depth cap below the frontier
      CHECK(res.from.state.id == 2);
      CHECK(res.from.action == 0);  // the 0.9 leaf
    }
  }

  SUBCASE("fresh tree returns a depth-1 state") {
    const TabularTreeProcess env = make_uniform_tree(3, 2);
    TableProvider oracle(2);
    SearchTree tree(env.horizon(), 50);
    expand(tree, env.root(), std::nullopt, env, oracle);
    Rng rng(2);
    const DescentResult res = descend(
        tree, [](const SearchNode& n, Rng& r) { return select_tsts(n, r); },
        rng);
    CHECK(res.expandable);
    CHECK(res.state.depth == 1);
    CHECK(tree.root_node().visit_count == 1);
  }

  SUBCASE("two-arm TS frequency matches the analytic gaussian comparison") {
    const TabularTreeProcess env = make_uniform_tree(1, 2);
    TableProvider oracle(2);
    oracle.set(0, 0, Posterior::gaussian(1.0, 1.0));
    oracle.set(0, 1, Posterior::gaussian(0.0, 1.0));
    SearchTree tree(env.horizon(), 50);
    expand(tree, env.root(), std::nullopt, env, oracle);
    Rng rng(3);
    int arm0 = 0;
    const int n = 10000;
    for (int i = 0; i < n; ++i) {
      const DescentResult res = descend(
          tree, [](const SearchNode& nd, Rng& r) { return select_tsts(nd, r); },
          rng);
      if (res.from.action == 0) ++arm0;
    }
    const double expected = normal_cdf(1.0 / std::sqrt(2.0));
    CHECK(static_cast<double>(arm0) / n ==
          doctest::Approx(expected).epsilon(0.015));
  }
}

TEST_CASE("random expansion sequences keep the fold invariant") {
  Rng rng(77);
  for (int trial = 0; trial < 10; ++trial) {
    const TabularTreeProcess env = make_uniform_tree(3, 2);
    TableProvider oracle(2, Posterior::gaussian(0.0, 1.0));
    for (std::uint64_t s = 0; s < env.state_count(); ++s) {
      for (int a = 0; a < 2; ++a) {
        oracle.set(s, a,
                   Posterior::gaussian(rng.uniform(-2.0, 2.0),
                                       rng.uniform(0.1, 1.5)));
      }
    }
    PlannerConfig cfg = default_config(Algorithm::tsts);
    cfg.budget = 10;
    cfg.seed = 1000 + static_cast<std::uint64_t>(trial);
    Rng search_rng(cfg.seed);
    const SearchOutcome out = run_search(env, oracle, cfg, search_rng);
    check_fold_equals_incremental(*out.tree);

    // Known set size: root plus one expansion per exploring iteration.
    std::size_t expansions = 0;
    for (const DescentStep& z : out.explored_leaves) {
      const SearchNode& n = out.tree->node(z.state);
      const StateRef child = n.edges[static_cast<std::size_t>(z.action)].child;
      if (out.tree->contains(child)) ++expansions;
    }
    CHECK(out.tree->node_count() == expansions + 1);

    // Visit counts cannot grow with depth.
    std::map<int, int> visits_by_depth;
    out.tree->for_each_node([&](const SearchNode& n) {
      visits_by_depth[n.state.depth] += n.visit_count;
    });
    int prev = -1;
    for (const auto& [depth, visits] : visits_by_depth) {
      if (prev >= 0) CHECK(visits <= prev);
      prev = visits;
    }
  }
}

TEST_CASE("exhaustive zero-variance search finds the exact optimum") {
  Rng rng(55);
  for (int trial = 0; trial < 5; ++trial) {
    // Random rewards on a depth-3 binary tree, exact point-mass oracle.
    std::vector<double> rewards(14);
    for (double& r : rewards) r = rng.uniform(-1.0, 1.0);
    const TabularTreeProcess env(3, 2, rewards, /*terminal_leaves=*/true);

    TableProvider oracle(2, Posterior::point_mass(0.0));
    for (std::uint64_t s = 0; s < 7; ++s) {  // internal states
      const std::vector<double> q = env.gt_q({s, s, 0});
      oracle.set(s, 0, Posterior::point_mass(q[0]));
      oracle.set(s, 1, Posterior::point_mass(q[1]));
    }

    // Independent reference: enumerate all 2^3 action sequences by stepping
    // the environment, never consulting its value table.
    double best_return = -1e300;
    int best_root = 0;
    for (int seq = 0; seq < 8; ++seq) {
      StateRef s = env.root();
      double total = 0.0;
      for (int d = 0; d < 3; ++d) {
        const int a = (seq >> d) & 1;
        auto [next, r] = env.step(s, a);
        total += r;
        s = next;
      }
      if (total > best_return) {
        best_return = total;
        best_root = seq & 1;
      }
    }

    PlannerConfig cfg = default_config(Algorithm::tsts);
    cfg.budget = 20;  // >= |Z| = 14
    Rng search_rng(trial);
    const SearchOutcome out = run_search(env, oracle, cfg, search_rng);
    CHECK(argmax_index(out.root_backed_values) == best_root);
    CHECK(out.root_backed_values[static_cast<std::size_t>(best_root)] ==
          doctest::Approx(best_return).epsilon(1e-9));
  }
}
