#pragma once

#include <Eigen/Dense>

#include "maxstab/core.hpp"

namespace maxstab {

enum class SpatialFamily { brown_resnick_variogram, schlather_powexp };

/// Locations (one row per site) plus the raw parameters of a spatial
/// correlation family.
///   brown_resnick_variogram: gamma(h) = |h|^alpha / scale, alpha in (0, 2)
///   schlather_powexp:        rho(h) = exp(-|h|^alpha / scale), alpha in (0, 2], with nu
struct SpatialConfig {
  Eigen::MatrixXd locations;
  SpatialFamily family = SpatialFamily::brown_resnick_variogram;
  double scale = 1.0;
  double alpha = 1.0;
  double nu = 1.0;
};

/// Pairwise Euclidean distances between the rows of `locations`.
Eigen::MatrixXd pairwise_distances(const Eigen::MatrixXd& locations);

/// Maps a spatial configuration to model parameters:
/// Huesler-Reiss lambda^2_ij = gamma(t_i - t_j) / 4, or an extremal-t
/// correlation matrix. Throws NotIdentifiable when all pairwise distances are
/// equal, InvalidArgument for repeated locations, OutOfDomain for bad raw
/// parameters.
ParamVector map_spatial_params(const SpatialConfig& config);

}  // namespace maxstab
