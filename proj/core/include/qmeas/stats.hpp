#pragma once

namespace qmeas {

/// Standard normal CDF.
double normal_cdf(double x);

/// Inverse standard normal CDF for p in (0, 1). Acklam's rational
/// approximation polished by one Halley step; good to ~1e-14.
double normal_quantile(double p);

}  // namespace qmeas
