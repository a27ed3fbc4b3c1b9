#pragma once

#include <cstdint>
#include <utility>
#include <vector>

namespace bayesplan {

// Opaque handle to an environment state as reached along one action
// sequence. `id` identifies the path (a hash chain from the root), so two
// action sequences arriving at the same underlying observation still count
// as distinct states and the discovered structure stays a tree. `obs` is
// the underlying observation index (maze tile, tree node).
struct StateRef {
  std::uint64_t id = 0;
  std::uint64_t obs = 0;
  int depth = 0;

  friend bool operator==(const StateRef&, const StateRef&) = default;
};

// A deterministic decision process of bounded depth with a fixed action set.
// step() is a pure function: identical inputs give bit-identical outputs.
class DecisionProcess {
 public:
  virtual ~DecisionProcess() = default;

  virtual StateRef root() const = 0;
  virtual int action_count() const = 0;
  virtual std::pair<StateRef, double> step(const StateRef& state,
                                           int action) const = 0;
  virtual bool is_terminal(const StateRef& state) const = 0;
  virtual int horizon() const = 0;
  virtual double reward_bound() const = 0;

  // Depth- and path-independent identity of the underlying observation;
  // oracles key their per-state randomness on this so that the same world
  // state seen anywhere in the tree gets the same prediction.
  virtual std::uint64_t observation_key(const StateRef& state) const {
    return state.obs;
  }
};

// Environments that can produce exact Q values implement this alongside
// DecisionProcess. Used by the ground-truth oracles and regret measurement.
class GroundTruthSource {
 public:
  virtual ~GroundTruthSource() = default;

  // Exact Q(s, a) for every action, including the immediate reward.
  virtual std::vector<double> gt_q(const StateRef& state) const = 0;
};

}  // namespace bayesplan
