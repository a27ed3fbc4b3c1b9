#pragma once

#include <span>
#include <vector>

#include "bayesplan/rng.hpp"

namespace bayesplan {

// Which path quantile() and sample() take for discrete-CDF distributions:
// by default both moment-match to a Gaussian, which is cheap and was found
// to behave almost identically to the exact CDF computation. The exact path
// is kept selectable for cross-checking.
enum class CdfMode { gaussian_approx, exact_cdf };

struct Moments {
  double mean = 0.0;
  double var = 0.0;
};

// A state-action value distribution P(Q(s,a)): either a Gaussian (possibly
// a point mass, std = 0) or a discrete CDF tabulated on strictly increasing
// bins. Immutable value type; moments are computed once at construction.
class Posterior {
 public:
  Posterior() : Posterior(gaussian(0.0, 1.0)) {}

  static Posterior gaussian(double mean, double stddev);
  static Posterior point_mass(double value) { return gaussian(value, 0.0); }
  static Posterior discrete_cdf(std::vector<double> bins,
                                std::vector<double> cdf);

  bool is_gaussian() const { return is_gaussian_; }
  bool is_point_mass() const { return is_gaussian_ && gauss_std_ == 0.0; }

  double gaussian_mean() const { return gauss_mean_; }
  double gaussian_std() const { return gauss_std_; }
  const std::vector<double>& bins() const { return bins_; }
  const std::vector<double>& cdf() const { return cdf_; }

  double mean() const { return moments_.mean; }
  double var() const { return moments_.var; }

  // CDF value at x, linearly interpolated; clamped to 0 left of the bin
  // range and 1 right of it.
  double cdf_at(double x) const;

 private:
  Posterior(bool g) : is_gaussian_(g) {}

  friend Posterior shift(const Posterior& dist, double r);

  bool is_gaussian_ = true;
  double gauss_mean_ = 0.0;
  double gauss_std_ = 1.0;
  std::vector<double> bins_;
  std::vector<double> cdf_;
  Moments moments_;
};

// Number of bins used when tabulating distributions for the max operation.
inline constexpr int kDefaultBins = 50;

// Tabulates dist as a discrete CDF over m linearly spaced bins running from
// its 0.001-quantile to its 0.999-quantile (for a Gaussian this covers about
// +-3 standard deviations). A point mass becomes a two-bin step CDF.
Posterior discretize(const Posterior& dist, int m);

// Distribution of max(X_1, ..., X_n) for independent X_i. Each input is
// tabulated, interpolated onto a common grid of m bins spanning
// [max_i first_bin_i, max_i last_bin_i], and the CDFs are multiplied
// pointwise. The result does not depend on the input order.
Posterior max_of_independent(std::span<const Posterior> dists, int m);

// Distribution of X + r.
Posterior shift(const Posterior& dist, double r);

// Mean and variance. Gaussians are exact; for a discrete CDF the mass of
// each interval sits at its midpoint and the residual tail masses cdf[0]
// and 1 - cdf[M-1] sit on the end bins.
Moments mean_var(const Posterior& dist);

// alpha-quantile for alpha in (0, 1).
double quantile(const Posterior& dist, double alpha,
                CdfMode mode = CdfMode::gaussian_approx);

// One draw from dist; deterministic given the rng state.
double sample(const Posterior& dist, Rng& rng,
              CdfMode mode = CdfMode::gaussian_approx);

}  // namespace bayesplan
