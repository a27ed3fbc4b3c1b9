#include "bayesplan/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <stdexcept>

namespace bayesplan {

namespace {

constexpr std::uint64_t kPredictorSalt = 0x70726564ULL;
constexpr std::uint64_t kPerturbSalt = 0x70657274ULL;
constexpr std::uint64_t kMaxBruteForceLeaves = 10000;
constexpr double kStepEps = 1e-9;

}  // namespace

CorruptedPredictor::CorruptedPredictor(const DecisionProcess& env,
                                       const GroundTruthSource& gt,
                                       double error_scale, std::uint64_t seed)
    : env_(&env), gt_(&gt), error_scale_(error_scale), seed_(seed) {
  if (error_scale < 0.0) {
    throw std::invalid_argument("CorruptedPredictor: negative error scale");
  }
}

std::uint64_t CorruptedPredictor::key(const StateRef& state, int action) const {
  return derive_seed({kPredictorSalt, seed_, env_->observation_key(state),
                      static_cast<std::uint64_t>(action)});
}

std::vector<double> CorruptedPredictor::gt(const StateRef& state) const {
  return gt_->gt_q(state);
}

std::vector<double> CorruptedPredictor::mu(const StateRef& state) const {
  std::vector<double> q = gt_->gt_q(state);
  for (int a = 0; a < env_->action_count(); ++a) {
    Rng draw(key(state, a));
    const double scale =
        error_scale_ * std::abs(q[static_cast<std::size_t>(a)]) + kErrorFloor;
    q[static_cast<std::size_t>(a)] += error_scale_ == 0.0
                                          ? 0.0
                                          : scale * draw.gaussian();
  }
  return q;
}

namespace {

class GtSigmaProvider : public QueryProvider {
 public:
  explicit GtSigmaProvider(std::shared_ptr<const CorruptedPredictor> p)
      : predictor_(std::move(p)) {}

  std::vector<Posterior> query(const StateRef& state) const override {
    const std::vector<double> mu = predictor_->mu(state);
    const std::vector<double> gt = predictor_->gt(state);
    std::vector<Posterior> out;
    out.reserve(mu.size());
    for (std::size_t a = 0; a < mu.size(); ++a) {
      out.push_back(Posterior::gaussian(mu[a], std::abs(mu[a] - gt[a])));
    }
    return out;
  }

 private:
  std::shared_ptr<const CorruptedPredictor> predictor_;
};

class FixedSigmaProvider : public QueryProvider {
 public:
  FixedSigmaProvider(std::shared_ptr<const CorruptedPredictor> p, double sigma0)
      : predictor_(std::move(p)), sigma0_(sigma0) {
    if (sigma0 < 0.0) {
      throw std::invalid_argument("fixed_sigma_query: negative sigma0");
    }
  }

  std::vector<Posterior> query(const StateRef& state) const override {
    const std::vector<double> mu = predictor_->mu(state);
    std::vector<Posterior> out;
    out.reserve(mu.size());
    for (double m : mu) out.push_back(Posterior::gaussian(m, sigma0_));
    return out;
  }

 private:
  std::shared_ptr<const CorruptedPredictor> predictor_;
  double sigma0_;
};

class PerturbSigmaProvider : public QueryProvider {
 public:
  PerturbSigmaProvider(std::shared_ptr<const QueryProvider> inner,
                       const DecisionProcess& env, double rho,
                       std::uint64_t seed)
      : inner_(std::move(inner)), env_(&env), rho_(rho), seed_(seed) {
    if (rho < 0.0 || rho > 100.0) {
      throw std::invalid_argument("perturb_sigma: rho must be in [0, 100]");
    }
  }

  std::vector<Posterior> query(const StateRef& state) const override {
    std::vector<Posterior> out = inner_->query(state);
    for (std::size_t a = 0; a < out.size(); ++a) {
      if (!out[a].is_gaussian()) continue;
      Rng draw(derive_seed({kPerturbSalt, seed_, env_->observation_key(state),
                            static_cast<std::uint64_t>(a)}));
      const double u = draw.uniform(-0.01 * rho_, 0.01 * rho_);
      out[a] = Posterior::gaussian(out[a].gaussian_mean(),
                                   out[a].gaussian_std() * (1.0 + u));
    }
    return out;
  }

 private:
  std::shared_ptr<const QueryProvider> inner_;
  const DecisionProcess* env_;
  double rho_;
  std::uint64_t seed_;
};

}  // namespace

std::unique_ptr<QueryProvider> gt_sigma_query(
    std::shared_ptr<const CorruptedPredictor> predictor) {
  return std::make_unique<GtSigmaProvider>(std::move(predictor));
}

std::unique_ptr<QueryProvider> fixed_sigma_query(
    std::shared_ptr<const CorruptedPredictor> predictor, double sigma0) {
  return std::make_unique<FixedSigmaProvider>(std::move(predictor), sigma0);
}

std::unique_ptr<QueryProvider> perturb_sigma(
    std::shared_ptr<const QueryProvider> inner, const DecisionProcess& env,
    double rho_percent, Rng& rng) {
  return std::make_unique<PerturbSigmaProvider>(std::move(inner), env,
                                                rho_percent, rng.next());
}

void TableProvider::set(std::uint64_t observation_key, int action,
                        Posterior dist) {
  table_.insert_or_assign({observation_key, action}, std::move(dist));
}

std::vector<Posterior> TableProvider::query(const StateRef& state) const {
  const std::uint64_t key =
      env_ != nullptr ? env_->observation_key(state) : state.id;
  std::vector<Posterior> out;
  out.reserve(static_cast<std::size_t>(actions_));
  for (int a = 0; a < actions_; ++a) {
    const auto it = table_.find({key, a});
    out.push_back(it != table_.end() ? it->second : fallback_);
  }
  return out;
}

Posterior two_point_dist(double lo, double hi, double p_hi) {
  if (!(hi > lo + 2.0 * kStepEps)) {
    throw std::invalid_argument("two_point_dist: need lo < hi");
  }
  if (!(p_hi >= 0.0 && p_hi <= 1.0)) {
    throw std::invalid_argument("two_point_dist: p_hi outside [0, 1]");
  }
  return Posterior::discrete_cdf({lo - kStepEps, lo, hi - kStepEps, hi},
                                 {0.0, 1.0 - p_hi, 1.0 - p_hi, 1.0});
}

NeedlePriorProvider::NeedlePriorProvider(const NeedleFamily& family)
    : branching_(family.branching),
      state_count_(
          TabularTreeProcess::count_states(family.depth, family.branching)) {
  mass_ = family.prior;
  // Accumulate subtree mass bottom-up; edge e is child state e + 1.
  for (std::uint64_t e = state_count_ - 1; e-- > 0;) {
    const std::uint64_t c = e + 1;
    for (int a = 0; a < branching_; ++a) {
      const std::uint64_t cc =
          c * static_cast<std::uint64_t>(branching_) + 1 +
          static_cast<std::uint64_t>(a);
      if (cc >= state_count_) break;
      mass_[static_cast<std::size_t>(e)] +=
          mass_[static_cast<std::size_t>(cc - 1)];
    }
  }
}

std::vector<Posterior> NeedlePriorProvider::query(const StateRef& state) const {
  std::vector<Posterior> out;
  out.reserve(static_cast<std::size_t>(branching_));
  for (int a = 0; a < branching_; ++a) {
    const std::uint64_t c = state.id * static_cast<std::uint64_t>(branching_) +
                            1 + static_cast<std::uint64_t>(a);
    if (c >= state_count_) {
      throw std::logic_error("NeedlePriorProvider: query below horizon");
    }
    out.push_back(two_point_dist(0.0, 1.0, subtree_mass(c - 1)));
  }
  return out;
}

TsDistribution brute_force_ts_distribution(const DecisionProcess& env,
                                           const QueryProvider& provider,
                                           std::uint64_t n_samples, Rng& rng) {
  // Materialize the full tree. An edge is a frontier edge when its child is
  // terminal or sits at the horizon; those are the sampled leaves.
  struct Edge {
    double reward = 0.0;
    int child_node = -1;    // index into nodes, -1 for frontier edges
    int leaf_index = -1;    // index into leaf posteriors, -1 for inner edges
    bool terminal = false;  // frontier edge with a terminal child
  };
  struct Node {
    std::vector<Edge> edges;
  };
  std::vector<Node> nodes;
  std::vector<Posterior> leaf_posteriors;
  std::vector<std::pair<StateRef, int>> leaf_ids;
  std::uint64_t leaf_count = 0;

  struct Pending {
    StateRef state;
    int node;
  };
  // Breadth-first, so leaf indices follow the natural reading order of the
  // tree and children always come after their parents.
  std::deque<Pending> queue;
  nodes.emplace_back();
  queue.push_back({env.root(), 0});
  const int actions = env.action_count();
  while (!queue.empty()) {
    const Pending cur = queue.front();
    queue.pop_front();
    std::vector<Posterior> q = provider.query(cur.state);
    nodes[static_cast<std::size_t>(cur.node)].edges.resize(
        static_cast<std::size_t>(actions));
    for (int a = 0; a < actions; ++a) {
      auto [child, reward] = env.step(cur.state, a);
      Edge& e = nodes[static_cast<std::size_t>(cur.node)]
                    .edges[static_cast<std::size_t>(a)];
      e.reward = reward;
      if (env.is_terminal(child)) {
        e.terminal = true;
        e.leaf_index = static_cast<int>(leaf_count++);
        leaf_posteriors.push_back(Posterior::point_mass(reward));
        leaf_ids.emplace_back(cur.state, a);
      } else if (child.depth >= env.horizon()) {
        e.leaf_index = static_cast<int>(leaf_count++);
        leaf_posteriors.push_back(q[static_cast<std::size_t>(a)]);
        leaf_ids.emplace_back(cur.state, a);
      } else {
        e.child_node = static_cast<int>(nodes.size());
        nodes.emplace_back();
        queue.push_back({child, e.child_node});
      }
      if (leaf_count > kMaxBruteForceLeaves) {
        throw std::invalid_argument(
            "brute_force_ts_distribution: tree too large to enumerate");
      }
    }
  }

  TsDistribution result;
  result.counts.assign(static_cast<std::size_t>(leaf_count), 0);
  result.total = n_samples;
  result.leaves = std::move(leaf_ids);

  std::vector<double> node_value(nodes.size());
  std::vector<double> leaf_value(static_cast<std::size_t>(leaf_count));
  for (std::uint64_t s = 0; s < n_samples; ++s) {
    for (std::size_t l = 0; l < leaf_value.size(); ++l) {
      leaf_value[l] = sample(leaf_posteriors[l], rng, CdfMode::exact_cdf);
    }
    // Children were appended after their parents, so a reverse sweep is a
    // bottom-up evaluation.
    for (std::size_t n = nodes.size(); n-- > 0;) {
      double best = -std::numeric_limits<double>::infinity();
      for (const Edge& e : nodes[n].edges) {
        const double v =
            e.child_node >= 0
                ? e.reward + node_value[static_cast<std::size_t>(e.child_node)]
                : leaf_value[static_cast<std::size_t>(e.leaf_index)];
        best = std::max(best, v);
      }
      node_value[n] = best;
    }
    // Follow the argmax branch to its frontier edge.
    int n = 0;
    for (;;) {
      int best_a = 0;
      double best_v = -std::numeric_limits<double>::infinity();
      for (std::size_t a = 0; a < nodes[static_cast<std::size_t>(n)].edges.size();
           ++a) {
        const Edge& e = nodes[static_cast<std::size_t>(n)].edges[a];
        const double v =
            e.child_node >= 0
                ? e.reward + node_value[static_cast<std::size_t>(e.child_node)]
                : leaf_value[static_cast<std::size_t>(e.leaf_index)];
        if (v > best_v) {
          best_v = v;
          best_a = static_cast<int>(a);
        }
      }
      const Edge& e = nodes[static_cast<std::size_t>(n)]
                          .edges[static_cast<std::size_t>(best_a)];
      if (e.child_node < 0) {
        ++result.counts[static_cast<std::size_t>(e.leaf_index)];
        break;
      }
      n = e.child_node;
    }
  }

  result.probs.resize(result.counts.size());
  for (std::size_t i = 0; i < result.counts.size(); ++i) {
    result.probs[i] = static_cast<double>(result.counts[i]) /
                      static_cast<double>(result.total);
  }
  return result;
}

double prior_entropy(std::span<const double> probs) {
  double sum = 0.0;
  for (double p : probs) {
    if (p < 0.0) {
      throw std::invalid_argument("prior_entropy: negative probability");
    }
    sum += p;
  }
  if (std::abs(sum - 1.0) > 1e-9) {
    throw std::invalid_argument("prior_entropy: probabilities must sum to 1");
  }
  double h = 0.0;
  for (double p : probs) {
    if (p > 0.0) h -= p * std::log(p);
  }
  return h;
}

}  // namespace bayesplan
