#pragma once

// Distribution kernel: standard normal, central and noncentral t.
//
// Every function is pure and thread-safe. Invalid arguments raise
// euii::DomainError; a series that fails to converge raises
// euii::NumericError.

namespace euii::dist {

/// Standard normal cdf. Accurate to ~1 ulp relative over the full range.
double std_normal_cdf(double x);

/// log Phi(x), finite for arbitrarily negative x (no underflow).
double log_std_normal_cdf(double x);

/// Inverse of the standard normal cdf for 0 < p < 1.
double std_normal_quantile(double p);

/// Standard normal density.
double std_normal_pdf(double x);

/// Central t cdf; df may be fractional.
double t_cdf(double x, double df);

/// Quantile of the central t distribution, 0 < p < 1, df > 0.
double t_quantile(double p, double df);

/// Noncentral t cdf P(T <= x) with T = (Z + ncp) / sqrt(V / df).
///
/// Sums the Poisson-weighted incomplete-beta series outward from the
/// mode of the Poisson weights, so large noncentralities do not underflow.
/// Terms are added until their relative contribution drops below 1e-12;
/// more than 10^4 terms raises NumericError.
double noncentral_t_cdf(double x, double df, double ncp);

/// log P(T <= x) for the noncentral t. Falls back to quadrature over the
/// chi-square mixing density when the series result underflows.
double log_noncentral_t_cdf(double x, double df, double ncp);

}  // namespace euii::dist
