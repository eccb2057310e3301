#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <functional>

namespace maxstab {

using ScalarField = std::function<double(const Eigen::VectorXd&)>;

/// Default central-difference step for coordinate x.
inline double default_step(double x) { return 1e-5 * std::max(1.0, std::abs(x)); }

/// Central-difference gradient. h <= 0 selects default_step per coordinate.
/// Throws NonFinite if g is not finite at a stencil point.
Eigen::VectorXd finite_diff_gradient(const ScalarField& g, const Eigen::VectorXd& x, double h = 0.0);

/// Central-difference Hessian with a common step h, symmetrized.
Eigen::MatrixXd finite_diff_hessian(const ScalarField& g, const Eigen::VectorXd& x, double h);

/// Jacobian of a vector field by central differences, one column per coordinate.
Eigen::MatrixXd finite_diff_jacobian(const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& g,
                                     const Eigen::VectorXd& x, double h = 0.0);

}  // namespace maxstab
