#pragma once

namespace netobs::stats {

/// Inverse error function on (-1, 1). Accurate to ~1e-15 (Newton-refined).
double erf_inv(double p);

/// Standard normal CDF.
double normal_cdf(double z);

/// Standard normal quantile, p in (0, 1).
double normal_quantile(double p);

/// Student's t quantile for df degrees of freedom, p in (0, 1).
double t_quantile(double p, double df);

/// Chi-square quantile for df degrees of freedom, p in [0, 1).
double chi2_quantile(double p, double df);

/// Regularized incomplete beta I_x(a, b), x in [0, 1].
double regularized_beta(double a, double b, double x);

/// Regularized lower incomplete gamma P(a, x).
double regularized_gamma_p(double a, double x);

} // namespace netobs::stats
