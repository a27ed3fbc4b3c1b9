#pragma once

namespace bayesplan {

// Standard normal CDF.
double normal_cdf(double x);

// Standard normal inverse CDF on (0, 1). Acklam's rational approximation
// refined with one Halley step; absolute error below 1e-12 over the
// usable range.
double normal_quantile(double p);

}  // namespace bayesplan
