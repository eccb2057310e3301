#include "maxstab/spatial.hpp"

#include <cmath>

#include "maxstab/error.hpp"

namespace maxstab {

Eigen::MatrixXd pairwise_distances(const Eigen::MatrixXd& locations) {
  const auto k = locations.rows();
  Eigen::MatrixXd d = Eigen::MatrixXd::Zero(k, k);
  for (Eigen::Index i = 0; i < k; ++i)
    for (Eigen::Index j = i + 1; j < k; ++j) d(i, j) = d(j, i) = (locations.row(i) - locations.row(j)).norm();
  return d;
}

ParamVector map_spatial_params(const SpatialConfig& config) {
  const auto k = config.locations.rows();
  require(k >= 2 && config.locations.cols() >= 1, ErrorCode::ShapeMismatch, "need at least two locations");
  require(config.locations.allFinite(), ErrorCode::NonFinite, "locations must be finite");
  require(config.scale > 0.0 && std::isfinite(config.scale), ErrorCode::OutOfDomain, "scale must be positive");
  const Eigen::MatrixXd d = pairwise_distances(config.locations);
  double dmin = d(0, 1), dmax = d(0, 1);
  for (Eigen::Index i = 0; i < k; ++i) {
    for (Eigen::Index j = i + 1; j < k; ++j) {
      require(d(i, j) > 0.0, ErrorCode::InvalidArgument, "locations must be pairwise distinct");
      dmin = std::min(dmin, d(i, j));
      dmax = std::max(dmax, d(i, j));
    }
  }
  require(dmax - dmin > 1e-12 * dmax, ErrorCode::NotIdentifiable,
          "all pairwise distances are equal; scale and shape cannot be separated");

  if (config.family == SpatialFamily::brown_resnick_variogram) {
    require(config.alpha > 0.0 && config.alpha < 2.0, ErrorCode::OutOfDomain, "variogram exponent must lie in (0, 2)");
    Eigen::MatrixXd l2 = Eigen::MatrixXd::Zero(k, k);
    for (Eigen::Index i = 0; i < k; ++i)
      for (Eigen::Index j = 0; j < k; ++j)
        if (i != j) l2(i, j) = std::pow(d(i, j), config.alpha) / config.scale / 4.0;
    return ParamVector::huesler_reiss(l2);
  }
  require(config.alpha > 0.0 && config.alpha <= 2.0, ErrorCode::OutOfDomain,
          "correlation exponent must lie in (0, 2]");
  Eigen::MatrixXd sigma = Eigen::MatrixXd::Identity(k, k);
  for (Eigen::Index i = 0; i < k; ++i)
    for (Eigen::Index j = 0; j < k; ++j)
      if (i != j) sigma(i, j) = std::exp(-std::pow(d(i, j), config.alpha) / config.scale);
  return ParamVector::extremal_t(sigma, config.nu);
}

}  // namespace maxstab
