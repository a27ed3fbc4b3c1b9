#include "bayesplan/posterior.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "bayesplan/normal.hpp"

namespace bayesplan {

namespace {

constexpr double kPointMassHalfWidth = 1e-9;
constexpr double kTailQuantile = 0.001;

// A grid of m bins over [lo, hi] collapses when the span is within rounding
// of the endpoint magnitudes; such supports are treated as point masses.
bool span_collapses(double lo, double hi, int m) {
  const double scale = std::max(std::abs(lo), std::abs(hi));
  return !(hi - lo > static_cast<double>(m) * scale * 1e-15);
}

Moments discrete_moments(const std::vector<double>& bins,
                         const std::vector<double>& cdf) {
  const std::size_t m = bins.size();
  double mean = 0.0, sq = 0.0;
  // Left tail mass on the first bin.
  double mass = cdf.front();
  mean += mass * bins.front();
  sq += mass * bins.front() * bins.front();
  for (std::size_t i = 1; i < m; ++i) {
    mass = cdf[i] - cdf[i - 1];
    const double x = 0.5 * (bins[i - 1] + bins[i]);
    mean += mass * x;
    sq += mass * x * x;
  }
  // Right tail mass on the last bin.
  mass = 1.0 - cdf.back();
  mean += mass * bins.back();
  sq += mass * bins.back() * bins.back();
  return {mean, std::max(0.0, sq - mean * mean)};
}

double interp_quantile(const std::vector<double>& bins,
                       const std::vector<double>& cdf, double alpha) {
  if (alpha <= cdf.front()) return bins.front();
  if (alpha >= cdf.back()) return bins.back();
  // Smallest interpolated value whose CDF reaches alpha.
  const auto it = std::lower_bound(cdf.begin(), cdf.end(), alpha);
  const std::size_t hi = static_cast<std::size_t>(it - cdf.begin());
  const std::size_t lo = hi - 1;
  const double dc = cdf[hi] - cdf[lo];
  if (dc <= 0.0) return bins[lo];
  const double t = (alpha - cdf[lo]) / dc;
  return bins[lo] + t * (bins[hi] - bins[lo]);
}

}  // namespace

Posterior Posterior::gaussian(double mean, double stddev) {
  if (!(stddev >= 0.0)) {
    throw std::invalid_argument("Posterior::gaussian: negative std");
  }
  if (!std::isfinite(mean) || !std::isfinite(stddev)) {
    throw std::invalid_argument("Posterior::gaussian: non-finite parameter");
  }
  Posterior p(true);
  p.gauss_mean_ = mean;
  p.gauss_std_ = stddev;
  p.moments_ = {mean, stddev * stddev};
  return p;
}

Posterior Posterior::discrete_cdf(std::vector<double> bins,
                                  std::vector<double> cdf) {
  if (bins.size() != cdf.size() || bins.size() < 2) {
    throw std::invalid_argument(
        "Posterior::discrete_cdf: bins/cdf must share length >= 2");
  }
  for (std::size_t i = 0; i < bins.size(); ++i) {
    if (!std::isfinite(bins[i])) {
      throw std::invalid_argument("Posterior::discrete_cdf: non-finite bin");
    }
    if (i > 0 && !(bins[i] > bins[i - 1])) {
      throw std::invalid_argument(
          "Posterior::discrete_cdf: bins must be strictly increasing");
    }
    if (!(cdf[i] >= 0.0 && cdf[i] <= 1.0)) {
      throw std::invalid_argument(
          "Posterior::discrete_cdf: cdf values must lie in [0, 1]");
    }
    if (i > 0 && cdf[i] < cdf[i - 1]) {
      throw std::invalid_argument(
          "Posterior::discrete_cdf: cdf must be nondecreasing");
    }
  }
  Posterior p(false);
  p.moments_ = discrete_moments(bins, cdf);
  p.bins_ = std::move(bins);
  p.cdf_ = std::move(cdf);
  return p;
}

double Posterior::cdf_at(double x) const {
  if (is_gaussian_) {
    if (gauss_std_ == 0.0) return x >= gauss_mean_ ? 1.0 : 0.0;
    return normal_cdf((x - gauss_mean_) / gauss_std_);
  }
  if (x <= bins_.front()) return x < bins_.front() ? 0.0 : cdf_.front();
  if (x >= bins_.back()) return x > bins_.back() ? 1.0 : cdf_.back();
  const auto it = std::upper_bound(bins_.begin(), bins_.end(), x);
  const std::size_t hi = static_cast<std::size_t>(it - bins_.begin());
  const std::size_t lo = hi - 1;
  const double t = (x - bins_[lo]) / (bins_[hi] - bins_[lo]);
  return cdf_[lo] + t * (cdf_[hi] - cdf_[lo]);
}

Posterior discretize(const Posterior& dist, int m) {
  if (m < 2) throw std::invalid_argument("discretize: need m >= 2");
  if (dist.is_point_mass()) {
    const double mu = dist.gaussian_mean();
    return Posterior::discrete_cdf({mu - kPointMassHalfWidth, mu}, {0.0, 1.0});
  }
  const double lo = quantile(dist, kTailQuantile, CdfMode::exact_cdf);
  const double hi = quantile(dist, 1.0 - kTailQuantile, CdfMode::exact_cdf);
  if (!(hi > lo) || span_collapses(lo, hi, m)) {
    // Numerically degenerate support; fall back to a step at the mean.
    const double mu = dist.mean();
    return Posterior::discrete_cdf(
        {mu - std::max(kPointMassHalfWidth, std::abs(mu) * 1e-12), mu},
        {0.0, 1.0});
  }
  std::vector<double> bins(static_cast<std::size_t>(m));
  std::vector<double> cdf(static_cast<std::size_t>(m));
  const double step = (hi - lo) / (m - 1);
  for (int i = 0; i < m; ++i) {
    bins[static_cast<std::size_t>(i)] = lo + step * i;
  }
  bins.back() = hi;
  for (int i = 0; i < m; ++i) {
    cdf[static_cast<std::size_t>(i)] =
        dist.cdf_at(bins[static_cast<std::size_t>(i)]);
  }
  return Posterior::discrete_cdf(std::move(bins), std::move(cdf));
}

Posterior max_of_independent(std::span<const Posterior> dists, int m) {
  if (dists.empty()) {
    throw std::invalid_argument("max_of_independent: empty input list");
  }
  if (m < 2) throw std::invalid_argument("max_of_independent: need m >= 2");

  // Tabulate Gaussian inputs; discrete inputs already carry their bins.
  std::vector<Posterior> tabulated;
  tabulated.reserve(dists.size());
  std::vector<const Posterior*> inputs;
  inputs.reserve(dists.size());
  for (const Posterior& d : dists) {
    if (d.is_gaussian()) {
      tabulated.push_back(discretize(d, m));
      inputs.push_back(&tabulated.back());
    } else {
      inputs.push_back(&d);
    }
  }

  double first_bin = inputs[0]->bins().front();
  double last_bin = inputs[0]->bins().back();
  for (const Posterior* d : inputs) {
    first_bin = std::max(first_bin, d->bins().front());
    last_bin = std::max(last_bin, d->bins().back());
  }
  if (span_collapses(first_bin, last_bin, m)) {
    // All surviving mass sits at one representable value.
    const double v = last_bin;
    return Posterior::discrete_cdf(
        {v - std::max(kPointMassHalfWidth, std::abs(v) * 1e-12), v},
        {0.0, 1.0});
  }

  std::vector<double> grid(static_cast<std::size_t>(m));
  const double step = (last_bin - first_bin) / (m - 1);
  for (int i = 0; i < m; ++i) {
    grid[static_cast<std::size_t>(i)] = first_bin + step * i;
  }
  grid.back() = last_bin;

  std::vector<double> out(static_cast<std::size_t>(m));
  std::vector<double> factors(inputs.size());
  for (int i = 0; i < m; ++i) {
    const double x = grid[static_cast<std::size_t>(i)];
    for (std::size_t k = 0; k < inputs.size(); ++k) {
      factors[k] = inputs[k]->cdf_at(x);
    }
    // Fixed multiplication order so the product is bit-identical under any
    // permutation of the input list.
    std::sort(factors.begin(), factors.end());
    double prod = 1.0;
    for (double f : factors) prod *= f;
    out[static_cast<std::size_t>(i)] = prod;
  }
  return Posterior::discrete_cdf(std::move(grid), std::move(out));
}

Posterior shift(const Posterior& dist, double r) {
  if (dist.is_gaussian()) {
    return Posterior::gaussian(dist.gaussian_mean() + r, dist.gaussian_std());
  }
  // Bins translate, masses stay put: the mean moves by exactly r and the
  // variance is carried over unchanged rather than recomputed.
  Posterior p(false);
  p.bins_ = dist.bins_;
  for (double& b : p.bins_) b += r;
  p.cdf_ = dist.cdf_;
  p.moments_ = {dist.moments_.mean + r, dist.moments_.var};
  return p;
}

Moments mean_var(const Posterior& dist) { return {dist.mean(), dist.var()}; }

double quantile(const Posterior& dist, double alpha, CdfMode mode) {
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw std::invalid_argument("quantile: alpha must be in (0, 1)");
  }
  if (dist.is_gaussian()) {
    if (dist.gaussian_std() == 0.0) return dist.gaussian_mean();
    return dist.gaussian_mean() + dist.gaussian_std() * normal_quantile(alpha);
  }
  if (mode == CdfMode::gaussian_approx) {
    const double sd = std::sqrt(dist.var());
    if (sd == 0.0) return dist.mean();
    return dist.mean() + sd * normal_quantile(alpha);
  }
  return interp_quantile(dist.bins(), dist.cdf(), alpha);
}

double sample(const Posterior& dist, Rng& rng, CdfMode mode) {
  if (dist.is_gaussian()) {
    if (dist.gaussian_std() == 0.0) return dist.gaussian_mean();
    return dist.gaussian_mean() + dist.gaussian_std() * rng.gaussian();
  }
  if (mode == CdfMode::gaussian_approx) {
    const double sd = std::sqrt(dist.var());
    if (sd == 0.0) return dist.mean();
    return dist.mean() + sd * rng.gaussian();
  }
  return interp_quantile(dist.bins(), dist.cdf(), rng.uniform_open());
}

}  // namespace bayesplan
