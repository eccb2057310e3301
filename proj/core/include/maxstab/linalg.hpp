#pragma once

#include <Eigen/Dense>

namespace maxstab {

/// Eigenvalue threshold used to call a symmetric matrix strictly positive definite.
inline constexpr double kStrictEigenThreshold = 1e-10;

double min_eigenvalue(const Eigen::MatrixXd& symmetric);

bool is_symmetric(const Eigen::MatrixXd& m, double tol = 1e-12);

/// The (k-1) x (k-1) matrix with (j,m) entry 2(l2_ij + l2_im - l2_jm), j,m != i.
Eigen::MatrixXd hr_r_matrix(const Eigen::MatrixXd& lambda2, int anchor);

/// The full k x k version anchored at `anchor` (row and column `anchor` are zero).
Eigen::MatrixXd hr_r_matrix_full(const Eigen::MatrixXd& lambda2, int anchor);

/// True iff Lambda is strictly conditionally negative definite, tested through
/// positive definiteness of R^(1). Throws ShapeMismatch for non-square input,
/// k < 2, a non-zero diagonal, or an asymmetric matrix.
bool check_cnd(const Eigen::MatrixXd& lambda2);

}  // namespace maxstab
