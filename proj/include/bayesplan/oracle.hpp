#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <vector>

#include "bayesplan/decision_process.hpp"
#include "bayesplan/posterior.hpp"
#include "bayesplan/tree_env.hpp"

namespace bayesplan {

// Per-action value posteriors for a state: P_query(Q(s, a)) and, through the
// environment, r_query(s, a). Providers are immutable and deterministic:
// repeated queries at the same state return bit-identical posteriors.
class QueryProvider {
 public:
  virtual ~QueryProvider() = default;
  virtual std::vector<Posterior> query(const StateRef& state) const = 0;
};

// Stand-in for a trained value network: mu(s, a) = Q_gt(s, a) + eps(s, a),
// where eps is a fixed seeded draw from N(0, error_scale * |Q_gt| + 0.1).
// Predictions near the goal (small |Q_gt|) are therefore more accurate,
// matching the usual decay of value-estimation error with distance to go.
class CorruptedPredictor {
 public:
  CorruptedPredictor(const DecisionProcess& env, const GroundTruthSource& gt,
                     double error_scale, std::uint64_t seed);

  std::vector<double> mu(const StateRef& state) const;
  std::vector<double> gt(const StateRef& state) const;
  std::uint64_t key(const StateRef& state, int action) const;
  int action_count() const { return env_->action_count(); }

  static constexpr double kErrorFloor = 0.1;

 private:
  const DecisionProcess* env_;
  const GroundTruthSource* gt_;
  double error_scale_;
  std::uint64_t seed_;
};

// Gaussian posteriors with the exact absolute prediction error as the
// standard deviation: sigma(s,a) = |mu(s,a) - Q_gt(s,a)|.
std::unique_ptr<QueryProvider> gt_sigma_query(
    std::shared_ptr<const CorruptedPredictor> predictor);

// Gaussian posteriors with one fixed standard deviation for every pair; the
// no-uncertainty-information control.
std::unique_ptr<QueryProvider> fixed_sigma_query(
    std::shared_ptr<const CorruptedPredictor> predictor, double sigma0);

// Wraps a provider, scaling every standard deviation by an independent
// per-(state, action) factor 1 + U with U ~ Uniform(-0.01*rho, 0.01*rho).
// The env supplies depth-independent observation keys for the factors.
std::unique_ptr<QueryProvider> perturb_sigma(
    std::shared_ptr<const QueryProvider> inner, const DecisionProcess& env,
    double rho_percent, Rng& rng);

// Explicit per-(observation key, action) posterior table with a default for
// unlisted pairs. Test and fixture support.
class TableProvider : public QueryProvider {
 public:
  explicit TableProvider(int action_count,
                         Posterior fallback = Posterior::gaussian(0.0, 1.0),
                         const DecisionProcess* env = nullptr)
      : actions_(action_count), fallback_(std::move(fallback)), env_(env) {}

  void set(std::uint64_t observation_key, int action, Posterior dist);
  std::vector<Posterior> query(const StateRef& state) const override;

 private:
  int actions_;
  Posterior fallback_;
  const DecisionProcess* env_;
  std::map<std::pair<std::uint64_t, int>, Posterior> table_;
};

// Marginal prior of Q(s, a) for a needle-tree family: a two-point {0, 1}
// distribution whose success probability is the prior mass of the subtree
// hanging off (s, a). Static across the search, as a learned predictor
// would be.
class NeedlePriorProvider : public QueryProvider {
 public:
  explicit NeedlePriorProvider(const NeedleFamily& family);
  std::vector<Posterior> query(const StateRef& state) const override;

  double subtree_mass(std::uint64_t edge) const {
    return mass_[static_cast<std::size_t>(edge)];
  }

 private:
  int branching_;
  std::uint64_t state_count_;
  std::vector<double> mass_;  // per edge: prior mass at or below it
};

// Two-point distribution on {lo, hi} with P(hi) = p_hi, encoded as a
// four-bin step CDF.
Posterior two_point_dist(double lo, double hi, double p_hi);

// Monte-Carlo estimate of the probability that each deepest-level edge lies
// on the optimal branch, when leaf values are drawn independently from the
// provider's posteriors and the tree is solved exactly by backward
// induction. The reference oracle for probability-matching checks.
struct TsDistribution {
  std::vector<std::uint64_t> counts;  // per frontier edge, breadth-first
  std::uint64_t total = 0;
  std::vector<double> probs;
  std::vector<std::pair<StateRef, int>> leaves;  // (state, action) per index
};

TsDistribution brute_force_ts_distribution(const DecisionProcess& env,
                                           const QueryProvider& provider,
                                           std::uint64_t n_samples, Rng& rng);

// Shannon entropy in nats of a normalized probability vector.
double prior_entropy(std::span<const double> probs);

}  // namespace bayesplan
