#ifndef SUBSEL_SPECIAL_HPP
#define SUBSEL_SPECIAL_HPP

namespace subsel {

/// Regularized incomplete beta I_z(a, b) for z in [0,1], a, b > 0.
double regularized_incomplete_beta(double z, double a, double b);

/// Unnormalized incomplete beta B(z; a, b) = int_0^z t^(a-1) (1-t)^(b-1) dt.
/// Relative accuracy better than 1e-10 over the supported domain.
double incomplete_beta(double z, double a, double b);

/// log of B(z; a, b); returns -infinity when the value underflows.
double log_incomplete_beta(double z, double a, double b);

/// log of the complete beta function B(a, b).
double log_beta(double a, double b);

/// Standard normal CDF.
double normal_cdf(double z);

/// Standard normal quantile (inverse CDF), p in (0, 1).
double normal_quantile(double p);

} // namespace subsel

#endif
