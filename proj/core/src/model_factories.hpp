#pragma once

#include <functional>
#include <memory>

#include "maxstab/model.hpp"
#include "maxstab/quadrature.hpp"

namespace maxstab::detail {

std::unique_ptr<Model> make_logistic(const ParamVector& params, const ModelOptions& options);
std::unique_ptr<Model> make_huesler_reiss(const ParamVector& params, const ModelOptions& options);
std::unique_ptr<Model> make_dirichlet(const ParamVector& params, const ModelOptions& options);
std::unique_ptr<Model> make_extremal_t(const ParamVector& params, const ModelOptions& options);

/// lambda_I(y) for a full k-vector y that vanishes off the face I.
using FaceDensity = std::function<double(std::span<const double>, SubsetIndicator)>;

/// V(z) = sum_I sum_{i in I, z_i finite} z_i^-1 int_{(0, z_{I\i}/z_i)} lambda_I(1_i, u) du.
/// Only the full face is visited unless `lower_faces` is set.
double exponent_from_faces(int k, std::span<const double> z, bool lower_faces, const FaceDensity& density,
                           const QuadratureOptions& options, double log_width);

/// D_S(z) = int_{(0, z_{S^c})} lambda(z_S, u) du for an interior density.
double block_from_density(int k, std::span<const double> z, SubsetIndicator s, const FaceDensity& density,
                          const QuadratureOptions& options, double log_width);

}  // namespace maxstab::detail
