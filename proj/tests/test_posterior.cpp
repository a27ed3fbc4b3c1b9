#include <doctest.h>

#include <cmath>

#include "bayesplan/normal.hpp"
#include "bayesplan/posterior.hpp"
#include "test_support.hpp"

using namespace bayesplan;

TEST_CASE("normal quantile matches reference values") {
  CHECK(normal_quantile(0.5) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(normal_quantile(0.975) == doctest::Approx(1.959963984540054).epsilon(1e-10));
  CHECK(normal_quantile(0.001) == doctest::Approx(-3.090232306167813).epsilon(1e-10));
  // Round trip across the usable range.
  for (double p = 0.0005; p < 1.0; p += 0.0131) {
    CHECK(normal_cdf(normal_quantile(p)) == doctest::Approx(p).epsilon(1e-10));
  }
  CHECK_THROWS_AS(normal_quantile(0.0), std::invalid_argument);
  CHECK_THROWS_AS(normal_quantile(1.0), std::invalid_argument);
}

TEST_CASE("gaussian construction") {
  const Posterior g = Posterior::gaussian(0.0, 1.0);
  CHECK(g.mean() == 0.0);
  CHECK(g.var() == 1.0);

  const Posterior pm = Posterior::gaussian(5.0, 0.0);
  CHECK(pm.is_point_mass());
  CHECK(pm.mean() == 5.0);
  CHECK(pm.var() == 0.0);

  // Root-edge values seen in the worked maze example.
  const Posterior up = Posterior::gaussian(-1.278, 0.278);
  CHECK(up.mean() == doctest::Approx(-1.278));
  CHECK(std::sqrt(up.var()) == doctest::Approx(0.278));

  CHECK_THROWS_AS(Posterior::gaussian(0.0, -0.1), std::invalid_argument);
}

TEST_CASE("discretize spans the 0.001..0.999 quantile range") {
  const Posterior d = discretize(Posterior::gaussian(0.0, 1.0), 50);
  REQUIRE(d.bins().size() == 50);
  CHECK(d.bins().front() == doctest::Approx(-3.0902).epsilon(1e-3));
  CHECK(d.bins().back() == doctest::Approx(3.0902).epsilon(1e-3));
  CHECK(d.cdf().front() == doctest::Approx(0.001).epsilon(1e-9));
  CHECK(d.cdf().back() == doctest::Approx(0.999).epsilon(1e-9));

  SUBCASE("point mass becomes a two-bin step") {
    const Posterior s = discretize(Posterior::point_mass(7.0), 50);
    REQUIRE(s.bins().size() == 2);
    CHECK(s.bins().back() == 7.0);
    CHECK(s.cdf().front() == 0.0);
    CHECK(s.cdf().back() == 1.0);
  }

  SUBCASE("affine equivariance of the bin grid") {
    const Posterior base = discretize(Posterior::gaussian(0.0, 1.0), 50);
    const Posterior moved = discretize(Posterior::gaussian(10.0, 2.0), 50);
    for (std::size_t i = 0; i < base.bins().size(); ++i) {
      CHECK(moved.bins()[i] ==
            doctest::Approx(10.0 + 2.0 * base.bins()[i]).epsilon(1e-9));
      CHECK(moved.cdf()[i] == doctest::Approx(base.cdf()[i]).epsilon(1e-12));
    }
  }

  CHECK_THROWS_AS(discretize(Posterior::gaussian(0, 1), 1),
                  std::invalid_argument);
}

TEST_CASE("max of point masses is the largest point mass") {
  const std::vector<Posterior> dists = {Posterior::point_mass(1.0),
                                        Posterior::point_mass(2.0)};
  const Posterior m = max_of_independent(dists, 50);
  CHECK(m.mean() == doctest::Approx(2.0).epsilon(1e-6));
  CHECK(m.var() == doctest::Approx(0.0).epsilon(1e-9));
}

TEST_CASE("max of two standard gaussians") {
  const std::vector<Posterior> dists = {Posterior::gaussian(0.0, 1.0),
                                        Posterior::gaussian(0.0, 1.0)};
  const Posterior m = max_of_independent(dists, 50);

  // Product rule at zero: 0.5 * 0.5.
  CHECK(m.cdf_at(0.0) == doctest::Approx(0.25).epsilon(2e-3));

  // Mean against the closed form 1/sqrt(pi), itself cross-checked by a
  // Monte-Carlo oracle.
  const double expected = 1.0 / std::sqrt(M_PI);
  Rng rng(1234);
  const double mc = test::mc_max_mean({{0.0, 1.0}, {0.0, 1.0}}, 1000000, rng);
  CHECK(mc == doctest::Approx(expected).epsilon(5e-3));
  CHECK(m.mean() == doctest::Approx(expected).epsilon(0.02 / expected));

  CHECK_THROWS_AS(max_of_independent(std::vector<Posterior>{}, 50),
                  std::invalid_argument);
}

TEST_CASE("max CDF is a valid CDF dominated by every input") {
  Rng rng(99);
  for (int trial = 0; trial < 50; ++trial) {
    const int n = 1 + static_cast<int>(rng.below(4));
    std::vector<Posterior> dists;
    for (int i = 0; i < n; ++i) {
      dists.push_back(Posterior::gaussian(rng.uniform(-5.0, 5.0),
                                          rng.uniform(0.1, 3.0)));
    }
    const Posterior m = max_of_independent(dists, 50);
    double largest_jump = 0.0;
    for (const Posterior& d : dists) {
      const Posterior t = discretize(d, 50);
      for (std::size_t i = 1; i < t.cdf().size(); ++i) {
        largest_jump = std::max(largest_jump, t.cdf()[i] - t.cdf()[i - 1]);
      }
    }
    for (std::size_t i = 0; i < m.bins().size(); ++i) {
      const double v = m.bins()[i];
      const double c = m.cdf()[i];
      CHECK(c >= 0.0);
      CHECK(c <= 1.0);
      if (i > 0) CHECK(c >= m.cdf()[i - 1]);
      double lo = 1.0;
      for (const Posterior& d : dists) lo = std::min(lo, d.cdf_at(v));
      CHECK(c <= lo + largest_jump + 1e-12);
    }
  }
}

TEST_CASE("single-input max is an identity up to discretization") {
  Rng rng(7);
  for (int trial = 0; trial < 20; ++trial) {
    const Posterior d =
        Posterior::gaussian(rng.uniform(-3.0, 3.0), rng.uniform(0.2, 2.0));
    std::vector<Posterior> one = {d};
    const Posterior m = max_of_independent(one, 50);
    CHECK(m.mean() == doctest::Approx(d.mean()).epsilon(0.02));
  }
}

TEST_CASE("max is invariant to input order, bit-exact") {
  Rng rng(2024);
  std::vector<Posterior> dists;
  for (int i = 0; i < 4; ++i) {
    dists.push_back(
        Posterior::gaussian(rng.uniform(-2.0, 2.0), rng.uniform(0.1, 2.0)));
  }
  const Posterior a = max_of_independent(dists, 50);
  std::reverse(dists.begin(), dists.end());
  std::swap(dists[0], dists[2]);
  const Posterior b = max_of_independent(dists, 50);
  REQUIRE(a.bins().size() == b.bins().size());
  for (std::size_t i = 0; i < a.bins().size(); ++i) {
    CHECK(a.bins()[i] == b.bins()[i]);
    CHECK(a.cdf()[i] == b.cdf()[i]);
  }
}

TEST_CASE("shift moves bins and mean, keeps variance") {
  SUBCASE("gaussian") {
    const Posterior s = shift(Posterior::gaussian(2.0, 1.0), 3.0);
    CHECK(s.gaussian_mean() == 5.0);
    CHECK(s.gaussian_std() == 1.0);
  }
  SUBCASE("zero shift is the identity") {
    const Posterior d = discretize(Posterior::gaussian(0.4, 1.3), 50);
    const Posterior s = shift(d, 0.0);
    for (std::size_t i = 0; i < d.bins().size(); ++i) {
      CHECK(s.bins()[i] == d.bins()[i]);
      CHECK(s.cdf()[i] == d.cdf()[i]);
    }
  }
  SUBCASE("discrete bins translate, masses fixed, moments exact") {
    const Posterior d = discretize(Posterior::gaussian(0.0, 1.0), 50);
    const Posterior s = shift(d, -1.0);
    for (std::size_t i = 0; i < d.bins().size(); ++i) {
      CHECK(s.bins()[i] == d.bins()[i] - 1.0);
      CHECK(s.cdf()[i] == d.cdf()[i]);
    }
    CHECK(s.mean() == d.mean() - 1.0);  // exact
    CHECK(s.var() == d.var());          // exact
  }
}

TEST_CASE("mean_var") {
  const Moments g = mean_var(Posterior::gaussian(3.0, 2.0));
  CHECK(g.mean == 3.0);
  CHECK(g.var == 4.0);

  const Moments pm = mean_var(discretize(Posterior::point_mass(5.0), 50));
  CHECK(pm.mean == doctest::Approx(5.0).epsilon(1e-8));
  CHECK(pm.var == doctest::Approx(0.0).epsilon(1e-9));

  const Moments d = mean_var(discretize(Posterior::gaussian(0.0, 1.0), 50));
  CHECK(std::abs(d.mean) < 0.01);
  CHECK(std::abs(d.var - 1.0) < 0.05);
}

TEST_CASE("quantile") {
  CHECK(quantile(Posterior::gaussian(0.0, 1.0), 0.5) == doctest::Approx(0.0));
  CHECK(quantile(Posterior::point_mass(3.0), 0.123) == 3.0);
  CHECK(quantile(Posterior::point_mass(3.0), 0.987) == 3.0);
  CHECK(quantile(Posterior::gaussian(0.0, 1.0), 0.8413) ==
        doctest::Approx(1.0).epsilon(1e-3));
  CHECK_THROWS_AS(quantile(Posterior::gaussian(0, 1), 0.0),
                  std::invalid_argument);
  CHECK_THROWS_AS(quantile(Posterior::gaussian(0, 1), 1.0),
                  std::invalid_argument);

  SUBCASE("monotone in alpha, both paths") {
    const Posterior d = discretize(Posterior::gaussian(0.7, 1.9), 50);
    for (const CdfMode mode : {CdfMode::gaussian_approx, CdfMode::exact_cdf}) {
      double prev = -1e300;
      for (double a = 0.02; a < 1.0; a += 0.02) {
        const double q = quantile(d, a, mode);
        CHECK(q >= prev);
        prev = q;
      }
    }
  }

  SUBCASE("exact path agrees with the gaussian path on a discretized gaussian") {
    const Posterior d = discretize(Posterior::gaussian(0.0, 1.0), 200);
    for (double a : {0.1, 0.3, 0.5, 0.7, 0.9}) {
      CHECK(quantile(d, a, CdfMode::exact_cdf) ==
            doctest::Approx(quantile(d, a, CdfMode::gaussian_approx))
                .epsilon(0.03));
    }
  }
}

TEST_CASE("sample") {
  SUBCASE("point mass always returns its value") {
    Rng rng(5);
    for (int i = 0; i < 100; ++i) {
      CHECK(sample(Posterior::point_mass(7.0), rng) == 7.0);
    }
  }
  SUBCASE("law of large numbers for a standard gaussian") {
    Rng rng(6);
    const Posterior g = Posterior::gaussian(0.0, 1.0);
    double sum = 0.0, sq = 0.0;
    const int n = 100000;
    for (int i = 0; i < n; ++i) {
      const double x = sample(g, rng);
      sum += x;
      sq += x * x;
    }
    const double mean = sum / n;
    const double sd = std::sqrt(sq / n - mean * mean);
    CHECK(std::abs(mean) < 0.02);
    CHECK(std::abs(sd - 1.0) < 0.02);
  }
  SUBCASE("same seed gives the same draw") {
    const Posterior d = discretize(Posterior::gaussian(1.0, 2.0), 50);
    Rng a(42), b(42);
    CHECK(sample(d, a) == sample(d, b));
    CHECK(sample(d, a, CdfMode::exact_cdf) == sample(d, b, CdfMode::exact_cdf));
  }
}

TEST_CASE("discrete cdf invariants are validated") {
  CHECK_THROWS_AS(Posterior::discrete_cdf({0.0}, {1.0}), std::invalid_argument);
  CHECK_THROWS_AS(Posterior::discrete_cdf({0.0, 0.0}, {0.0, 1.0}),
                  std::invalid_argument);
  CHECK_THROWS_AS(Posterior::discrete_cdf({0.0, 1.0}, {0.5, 0.4}),
                  std::invalid_argument);
  CHECK_THROWS_AS(Posterior::discrete_cdf({0.0, 1.0}, {0.0, 1.5}),
                  std::invalid_argument);
}
