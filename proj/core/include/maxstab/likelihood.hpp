#pragma once

#include <Eigen/Dense>

#include <span>
#include <vector>

#include "maxstab/core.hpp"
#include "maxstab/model.hpp"

namespace maxstab {

/// Pieces of the full density f(z) = exp(-V(z)) * sum over partitions of
/// prod_j D_{tau_j}(z).
struct DensityBreakdown {
  double exponent_value = 0.0;
  /// D_S(z) indexed by subset mask; entry 0 unused.
  std::vector<double> block_values;
  /// May underflow to 0 when evaluated in log space; log_partition_sum is exact.
  double partition_sum = 0.0;
  double log_partition_sum = 0.0;
  bool log_space = false;
  double log_density = 0.0;
};

/// Below this block value the partition sum switches to log space.
inline constexpr double kLogSpaceThreshold = 1e-300;

DensityBreakdown log_density(const Model& model, std::span<const double> z);
DensityBreakdown log_density(const ParamVector& params, std::span<const double> z, const ModelOptions& options = {});

struct LikelihoodOptions {
  ModelOptions model;
  /// Worker threads for the per-row terms; <= 0 means all cores.
  int threads = 1;
};

/// Per-row log densities, in row order.
std::vector<double> log_density_terms(const Model& model, const Dataset& data, int threads = 1);

/// Correctly rounded sum of the row log densities, so the total does not
/// depend on the row order. Throws LikelihoodUnderflow
/// when the total is -inf.
double log_likelihood(const Model& model, const Dataset& data, int threads = 1);
double log_likelihood(const ParamVector& params, const Dataset& data, const LikelihoodOptions& options = {});

enum class ScoreMethod { analytic, finite_diff };

/// d log f / d v at the unconstrained coordinates v = to_unconstrained(params).
/// The analytic form is implemented for the logistic family only.
Eigen::VectorXd score(const ParamVector& params, std::span<const double> z,
                      ScoreMethod method = ScoreMethod::finite_diff, const ModelOptions& options = {});

/// Scores for every row of a dataset (one row per observation).
Eigen::MatrixXd score_matrix(const ParamVector& params, const Dataset& data,
                             ScoreMethod method = ScoreMethod::finite_diff, const LikelihoodOptions& options = {});

}  // namespace maxstab
