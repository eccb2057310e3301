#pragma once

#include <Eigen/Dense>

#include "maxstab/finite_diff.hpp"

namespace maxstab {

struct NelderMeadOptions {
  double initial_step = 0.5;
  /// Stop once the spread of simplex values falls below this (relative to |f|).
  double value_tol = 1e-10;
  double size_tol = 1e-8;
  int max_iterations = 5000;
};

struct BfgsOptions {
  /// Euclidean norm of the gradient.
  double gradient_tol = 1e-5;
  /// Relative change of f between accepted steps.
  double value_rel_tol = 1e-9;
  int max_iterations = 500;
};

struct MinimizeResult {
  Eigen::VectorXd x;
  double value = 0.0;
  Eigen::VectorXd gradient;
  int iterations = 0;
  /// Relative change of f over the last accepted step.
  double last_rel_change = 0.0;
  bool converged = false;
};

/// Derivative-free minimization from x0 with a right-angled initial simplex.
MinimizeResult nelder_mead(const ScalarField& f, const Eigen::VectorXd& x0, const NelderMeadOptions& options = {});

/// Quasi-Newton minimization with central-difference gradients and a
/// backtracking Armijo line search. Converged when the gradient norm and the
/// relative change of f are both below their tolerances.
MinimizeResult bfgs(const ScalarField& f, const Eigen::VectorXd& x0, const BfgsOptions& options = {});

}  // namespace maxstab
