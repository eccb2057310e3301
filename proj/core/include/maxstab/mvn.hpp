#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <span>

namespace maxstab {

struct CdfResult {
  double value = 0.0;
  /// Three standard errors of the randomized-lattice estimate, the embedded
  /// quadrature error for p = 3, and 0 for p <= 2.
  double error_estimate = 0.0;
  bool converged = true;
  /// Set when a correlation within 1e-10 of +-1 was pulled back inside.
  bool clamped_correlation = false;
};

struct MvnOptions {
  double accuracy = 1e-6;
  int randomizations = 8;
  std::int64_t max_points_per_randomization = std::int64_t{1} << 18;
  std::uint64_t shift_seed = 0x6d766e5f636466ULL;
};

inline constexpr int kMaxMvnDim = 10;

/// P(X <= upper) for X ~ N(0, covariance).
///
/// Infinite upper limits are handled exactly (+inf marginalizes the
/// coordinate, -inf gives 0). p = 1 uses erfc, p = 2 a deterministic
/// bivariate rule, p = 3 adaptive quadrature of the bivariate rule over the
/// conditioning coordinate, p >= 4 separation of variables with Genz variable
/// prioritization integrated by an antithetic randomized Richtmyer lattice.
/// The randomizations use a fixed seed, so the estimate is a deterministic
/// function of its inputs.
///
/// Throws NotSPD, DimensionTooLarge (p > 10), ShapeMismatch, NonFinite.
CdfResult mvn_cdf(std::span<const double> upper, const Eigen::MatrixXd& covariance,
                  const MvnOptions& options = {});

CdfResult mvn_cdf(std::span<const double> upper, const Eigen::MatrixXd& covariance, double accuracy);

/// Density of N(0, covariance) at x, computed from a Cholesky factor.
double mvn_log_pdf(std::span<const double> x, const Eigen::MatrixXd& covariance);

}  // namespace maxstab
