#pragma once

namespace maxstab {

double normal_pdf(double x);
double normal_cdf(double x);
/// log Phi(x), accurate far into the lower tail.
double log_normal_cdf(double x);
double normal_quantile(double p);

/// P(X <= h, Y <= k) for a standard bivariate normal with correlation r,
/// |r| <= 1. Deterministic Gauss-Legendre evaluation (Drezner-Wesolowsky form
/// as refined by Genz), accurate to about 1e-15.
double bivariate_normal_cdf(double h, double k, double r);

/// Regularized lower incomplete gamma P(a, x).
double gamma_cdf(double shape, double x);

}  // namespace maxstab
