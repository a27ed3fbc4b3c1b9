#include "bayesplan/tree_env.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace bayesplan {

std::uint64_t TabularTreeProcess::count_states(int depth, int branching) {
  std::uint64_t n = 1, level = 1;
  for (int d = 0; d < depth; ++d) {
    level *= static_cast<std::uint64_t>(branching);
    n += level;
  }
  return n;
}

TabularTreeProcess::TabularTreeProcess(int depth, int branching,
                                       std::vector<double> edge_rewards,
                                       bool terminal_leaves)
    : depth_(depth),
      branching_(branching),
      terminal_leaves_(terminal_leaves),
      state_count_(count_states(depth, branching)),
      rewards_(std::move(edge_rewards)) {
  if (depth < 1 || branching < 1) {
    throw std::invalid_argument(
        "TabularTreeProcess: need depth >= 1 and branching >= 1");
  }
  if (rewards_.size() != state_count_ - 1) {
    throw std::invalid_argument(
        "TabularTreeProcess: one reward per edge required");
  }
  reward_bound_ = 0.0;
  for (double r : rewards_) reward_bound_ = std::max(reward_bound_, std::abs(r));

  // Exact optimal value-to-go by backward induction.
  state_value_.assign(static_cast<std::size_t>(state_count_), 0.0);
  const std::uint64_t first_leaf =
      state_count_ == 1 ? 0 : parent_state(state_count_ - 1) + 1;
  for (std::uint64_t s = first_leaf; s-- > 0;) {
    double best = -std::numeric_limits<double>::infinity();
    for (int a = 0; a < branching_; ++a) {
      const std::uint64_t c = child_state(s, a);
      best = std::max(best, rewards_[static_cast<std::size_t>(c - 1)] +
                                state_value_[static_cast<std::size_t>(c)]);
    }
    state_value_[static_cast<std::size_t>(s)] = best;
  }
}

std::pair<StateRef, double> TabularTreeProcess::step(const StateRef& state,
                                                     int action) const {
  const std::uint64_t c = child_state(state.id, action);
  if (c >= state_count_) {
    throw std::logic_error("TabularTreeProcess::step: below horizon");
  }
  return {StateRef{c, c, state.depth + 1},
          rewards_[static_cast<std::size_t>(c - 1)]};
}

bool TabularTreeProcess::is_terminal(const StateRef& state) const {
  return terminal_leaves_ && state.depth >= depth_;
}

std::vector<double> TabularTreeProcess::gt_q(const StateRef& state) const {
  std::vector<double> q(static_cast<std::size_t>(branching_));
  for (int a = 0; a < branching_; ++a) {
    const std::uint64_t c = child_state(state.id, a);
    q[static_cast<std::size_t>(a)] =
        rewards_[static_cast<std::size_t>(c - 1)] +
        state_value_[static_cast<std::size_t>(c)];
  }
  return q;
}

int TabularTreeProcess::root_action_of_edge(std::uint64_t edge) const {
  std::uint64_t s = edge + 1;
  while (s > static_cast<std::uint64_t>(branching_)) s = parent_state(s);
  return static_cast<int>(s - 1);
}

NeedleFamily make_needle_family(int depth, int branching) {
  NeedleFamily f;
  f.depth = depth;
  f.branching = branching;
  const std::uint64_t z =
      TabularTreeProcess::count_states(depth, branching) - 1;
  f.prior.assign(static_cast<std::size_t>(z), 1.0 / static_cast<double>(z));
  return f;
}

NeedleFamily make_needle_family_concentrated(int depth, int branching,
                                             double mass,
                                             std::uint64_t edge) {
  if (!(mass >= 0.0 && mass <= 1.0)) {
    throw std::invalid_argument("needle prior mass must be in [0, 1]");
  }
  NeedleFamily f;
  f.depth = depth;
  f.branching = branching;
  const std::uint64_t z =
      TabularTreeProcess::count_states(depth, branching) - 1;
  const double rest = z > 1 ? (1.0 - mass) / static_cast<double>(z - 1) : 0.0;
  f.prior.assign(static_cast<std::size_t>(z), rest);
  f.prior[static_cast<std::size_t>(edge)] = mass;
  return f;
}

std::uint64_t sample_needle_edge(const NeedleFamily& family, Rng& rng) {
  const double u = rng.uniform();
  double acc = 0.0;
  for (std::size_t i = 0; i < family.prior.size(); ++i) {
    acc += family.prior[i];
    if (u < acc) return static_cast<std::uint64_t>(i);
  }
  return static_cast<std::uint64_t>(family.prior.size() - 1);
}

TabularTreeProcess make_needle_process(const NeedleFamily& family,
                                       std::uint64_t needle_edge) {
  std::vector<double> rewards(family.prior.size(), 0.0);
  rewards.at(static_cast<std::size_t>(needle_edge)) = 1.0;
  return TabularTreeProcess(family.depth, family.branching, std::move(rewards),
                            /*terminal_leaves=*/true);
}

TabularTreeProcess make_uniform_tree(int depth, int branching) {
  const std::uint64_t z =
      TabularTreeProcess::count_states(depth, branching) - 1;
  return TabularTreeProcess(depth, branching,
                            std::vector<double>(static_cast<std::size_t>(z)),
                            /*terminal_leaves=*/false);
}

}  // namespace bayesplan
