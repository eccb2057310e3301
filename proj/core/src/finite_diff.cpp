#include "maxstab/finite_diff.hpp"

#include <cmath>

#include "maxstab/error.hpp"

namespace maxstab {

namespace {

double checked(const ScalarField& g, const Eigen::VectorXd& x) {
  const double v = g(x);
  require(std::isfinite(v), ErrorCode::NonFinite, "function is not finite at a finite-difference stencil point");
  return v;
}

}  // namespace

Eigen::VectorXd finite_diff_gradient(const ScalarField& g, const Eigen::VectorXd& x, double h) {
  Eigen::VectorXd grad(x.size());
  Eigen::VectorXd probe = x;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    const double step = h > 0.0 ? h : default_step(x(i));
    probe(i) = x(i) + step;
    const double up = checked(g, probe);
    probe(i) = x(i) - step;
    const double down = checked(g, probe);
    probe(i) = x(i);
    grad(i) = (up - down) / (2.0 * step);
  }
  return grad;
}

Eigen::MatrixXd finite_diff_hessian(const ScalarField& g, const Eigen::VectorXd& x, double h) {
  const auto d = x.size();
  Eigen::MatrixXd hess(d, d);
  Eigen::VectorXd p = x;
  const double center = checked(g, x);
  for (Eigen::Index i = 0; i < d; ++i) {
    p(i) = x(i) + h;
    const double up = checked(g, p);
    p(i) = x(i) - h;
    const double down = checked(g, p);
    p(i) = x(i);
    hess(i, i) = (up - 2.0 * center + down) / (h * h);
    for (Eigen::Index j = 0; j < i; ++j) {
      double acc = 0.0;
      for (const auto& [si, sj] : {std::pair{1.0, 1.0}, {1.0, -1.0}, {-1.0, 1.0}, {-1.0, -1.0}}) {
        p(i) = x(i) + si * h;
        p(j) = x(j) + sj * h;
        acc += si * sj * checked(g, p);
      }
      p(i) = x(i);
      p(j) = x(j);
      hess(i, j) = hess(j, i) = acc / (4.0 * h * h);
    }
  }
  return hess;
}

Eigen::MatrixXd finite_diff_jacobian(const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& g,
                                     const Eigen::VectorXd& x, double h) {
  Eigen::VectorXd probe = x;
  Eigen::MatrixXd jac;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    const double step = h > 0.0 ? h : default_step(x(i));
    probe(i) = x(i) + step;
    const Eigen::VectorXd up = g(probe);
    probe(i) = x(i) - step;
    const Eigen::VectorXd down = g(probe);
    probe(i) = x(i);
    require(up.allFinite() && down.allFinite(), ErrorCode::NonFinite,
            "function is not finite at a finite-difference stencil point");
    if (i == 0) jac.resize(up.size(), x.size());
    jac.col(i) = (up - down) / (2.0 * step);
  }
  return jac;
}

}  // namespace maxstab
