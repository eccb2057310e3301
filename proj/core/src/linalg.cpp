#include "maxstab/linalg.hpp"

#include "maxstab/error.hpp"

namespace maxstab {

double min_eigenvalue(const Eigen::MatrixXd& symmetric) {
  if (symmetric.size() == 0) return 0.0;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(symmetric, Eigen::EigenvaluesOnly);
  return solver.eigenvalues().minCoeff();
}

bool is_symmetric(const Eigen::MatrixXd& m, double tol) {
  if (m.rows() != m.cols()) return false;
  const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
  return (m - m.transpose()).cwiseAbs().maxCoeff() <= tol * scale;
}

Eigen::MatrixXd hr_r_matrix_full(const Eigen::MatrixXd& lambda2, int anchor) {
  const auto k = lambda2.rows();
  Eigen::MatrixXd r(k, k);
  for (Eigen::Index j = 0; j < k; ++j) {
    for (Eigen::Index m = 0; m < k; ++m) {
      r(j, m) = 2.0 * (lambda2(anchor, j) + lambda2(anchor, m) - lambda2(j, m));
    }
  }
  r.row(anchor).setZero();
  r.col(anchor).setZero();
  return r;
}

Eigen::MatrixXd hr_r_matrix(const Eigen::MatrixXd& lambda2, int anchor) {
  const auto k = static_cast<int>(lambda2.rows());
  Eigen::MatrixXd full = hr_r_matrix_full(lambda2, anchor);
  Eigen::MatrixXd r(k - 1, k - 1);
  for (int a = 0, ra = 0; a < k; ++a) {
    if (a == anchor) continue;
    for (int b = 0, rb = 0; b < k; ++b) {
      if (b == anchor) continue;
      r(ra, rb) = full(a, b);
      ++rb;
    }
    ++ra;
  }
  return r;
}

bool check_cnd(const Eigen::MatrixXd& lambda2) {
  require(lambda2.rows() == lambda2.cols(), ErrorCode::ShapeMismatch,
          "conditional negative definiteness needs a square matrix");
  require(lambda2.rows() >= 2, ErrorCode::ShapeMismatch,
          "conditional negative definiteness needs k >= 2");
  require(lambda2.diagonal().cwiseAbs().maxCoeff() == 0.0, ErrorCode::ShapeMismatch,
          "Lambda must have a zero diagonal");
  require(is_symmetric(lambda2), ErrorCode::ShapeMismatch, "Lambda must be symmetric");
  return min_eigenvalue(hr_r_matrix(lambda2, 0)) > kStrictEigenThreshold;
}

}  // namespace maxstab
