#pragma once

#include <functional>
#include <span>

namespace maxstab {

using BoxIntegrand = std::function<double(std::span<const double>)>;

struct QuadratureOptions {
  double abs_tol = 1e-12;
  double rel_tol = 1e-8;
  /// Region budget for the adaptive subdivision (interval halvings in 1-D).
  int max_subdivisions = 20000;
  /// Equal cells per axis the box is cut into before adapting.
  int initial_cells = 1;
};

struct QuadratureResult {
  double value = 0.0;
  double error_estimate = 0.0;
  int regions = 0;
};

inline constexpr int kMaxQuadratureDim = 3;

/// Adaptive cubature over the box [lower, upper] in 1 to 3 dimensions.
///
/// One dimension uses Gauss-Kronrod 7/15; two and three dimensions use the
/// Genz-Malik degree 7 rule with its embedded degree 5 error estimate,
/// bisecting the worst region along the axis with the largest fourth
/// difference. Succeeds once the global error estimate is below
/// max(abs_tol, rel_tol * |value|).
///
/// Throws MaxSubdivisions, NonFiniteIntegrand, DimensionTooLarge.
QuadratureResult integrate_box(const BoxIntegrand& f, std::span<const double> lower,
                               std::span<const double> upper, const QuadratureOptions& options = {});

double integrate_box(const BoxIntegrand& f, std::span<const double> lower, std::span<const double> upper,
                     double tol);

/// Default width, in log units, kept below each finite upper limit by the
/// exponential substitution of integrate_orthant.
inline constexpr double kLogTruncation = 40.0;

/// Integral of f over the open box (0, upper), upper entries possibly +inf.
///
/// Each coordinate is written u = exp(t); finite limits give t in
/// (log upper - width, log upper), infinite ones t in (-width, width).
QuadratureResult integrate_orthant(const BoxIntegrand& f, std::span<const double> upper,
                                   const QuadratureOptions& options = {}, double width = kLogTruncation);

}  // namespace maxstab
