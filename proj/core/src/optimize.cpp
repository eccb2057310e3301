#include "maxstab/optimize.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <vector>

#include "maxstab/error.hpp"

namespace maxstab {

namespace {

// Non-finite objective values are treated as +inf so the search backs away.
double safe_eval(const ScalarField& f, const Eigen::VectorXd& x) {
  try {
    const double v = f(x);
    return std::isfinite(v) ? v : std::numeric_limits<double>::infinity();
  } catch (const Error&) {
    return std::numeric_limits<double>::infinity();
  }
}

double rel_change(double before, double after) {
  return std::abs(before - after) / std::max(std::abs(after), 1e-300);
}

}  // namespace

MinimizeResult nelder_mead(const ScalarField& f, const Eigen::VectorXd& x0, const NelderMeadOptions& options) {
  const auto d = x0.size();
  std::vector<Eigen::VectorXd> pts(static_cast<std::size_t>(d + 1), x0);
  std::vector<double> vals(pts.size());
  for (Eigen::Index i = 0; i < d; ++i) pts[static_cast<std::size_t>(i + 1)](i) += options.initial_step;
  for (std::size_t i = 0; i < pts.size(); ++i) vals[i] = safe_eval(f, pts[i]);
  require(std::isfinite(vals[0]), ErrorCode::NonFinite, "objective is not finite at the starting point");

  std::vector<std::size_t> order(pts.size());
  MinimizeResult out;
  for (out.iterations = 0; out.iterations < options.max_iterations; ++out.iterations) {
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return vals[a] < vals[b]; });
    const std::size_t best = order.front(), worst = order.back(), second = order[order.size() - 2];

    double size = 0.0;
    for (std::size_t i : order) size = std::max(size, (pts[i] - pts[best]).lpNorm<Eigen::Infinity>());
    const double spread = vals[worst] - vals[best];
    if (spread <= options.value_tol * std::max(std::abs(vals[best]), 1.0) && size <= options.size_tol) {
      out.converged = true;
      break;
    }

    Eigen::VectorXd centroid = Eigen::VectorXd::Zero(d);
    for (std::size_t i : order)
      if (i != worst) centroid += pts[i];
    centroid /= static_cast<double>(d);

    const Eigen::VectorXd reflected = centroid + (centroid - pts[worst]);
    const double fr = safe_eval(f, reflected);
    if (fr < vals[best]) {
      const Eigen::VectorXd expanded = centroid + 2.0 * (centroid - pts[worst]);
      const double fe = safe_eval(f, expanded);
      if (fe < fr) {
        pts[worst] = expanded;
        vals[worst] = fe;
      } else {
        pts[worst] = reflected;
        vals[worst] = fr;
      }
      continue;
    }
    if (fr < vals[second]) {
      pts[worst] = reflected;
      vals[worst] = fr;
      continue;
    }
    const bool outside = fr < vals[worst];
    const Eigen::VectorXd contracted =
        outside ? Eigen::VectorXd(centroid + 0.5 * (reflected - centroid)) : Eigen::VectorXd(centroid + 0.5 * (pts[worst] - centroid));
    const double fc = safe_eval(f, contracted);
    if (fc < (outside ? fr : vals[worst])) {
      pts[worst] = contracted;
      vals[worst] = fc;
      continue;
    }
    for (std::size_t i : order) {
      if (i == best) continue;
      pts[i] = pts[best] + 0.5 * (pts[i] - pts[best]);
      vals[i] = safe_eval(f, pts[i]);
    }
  }
  const auto it = std::min_element(vals.begin(), vals.end());
  const auto idx = static_cast<std::size_t>(it - vals.begin());
  out.x = pts[idx];
  out.value = vals[idx];
  return out;
}

MinimizeResult bfgs(const ScalarField& f, const Eigen::VectorXd& x0, const BfgsOptions& options) {
  const auto d = x0.size();
  MinimizeResult out;
  out.x = x0;
  out.value = f(x0);
  require(std::isfinite(out.value), ErrorCode::NonFinite, "objective is not finite at the starting point");
  out.gradient = finite_diff_gradient(f, out.x);
  out.last_rel_change = std::numeric_limits<double>::infinity();
  Eigen::MatrixXd h_inv = Eigen::MatrixXd::Identity(d, d);

  for (out.iterations = 0; out.iterations < options.max_iterations; ++out.iterations) {
    if (out.gradient.norm() < options.gradient_tol && out.last_rel_change < options.value_rel_tol) {
      out.converged = true;
      return out;
    }
    Eigen::VectorXd dir = -h_inv * out.gradient;
    double slope = dir.dot(out.gradient);
    if (!(slope < 0.0)) {
      h_inv.setIdentity();
      dir = -out.gradient;
      slope = dir.dot(out.gradient);
    }
    double step = 1.0;
    Eigen::VectorXd next;
    double f_next = std::numeric_limits<double>::infinity();
    bool accepted = false;
    for (int tries = 0; tries < 60; ++tries) {
      next = out.x + step * dir;
      f_next = safe_eval(f, next);
      if (f_next <= out.value + 1e-4 * step * slope) {
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) {
      // no descent along the quasi-Newton direction: the point is stationary to
      // within the resolution of the finite-difference gradient
      out.last_rel_change = 0.0;
      out.converged = out.gradient.norm() < options.gradient_tol;
      return out;
    }
    Eigen::VectorXd g_next = finite_diff_gradient(f, next);
    const Eigen::VectorXd s = next - out.x;
    const Eigen::VectorXd y = g_next - out.gradient;
    const double sy = s.dot(y);
    if (sy > 1e-14 * s.norm() * y.norm()) {
      const double rho = 1.0 / sy;
      const Eigen::MatrixXd eye = Eigen::MatrixXd::Identity(d, d);
      h_inv = (eye - rho * s * y.transpose()) * h_inv * (eye - rho * y * s.transpose()) + rho * s * s.transpose();
    }
    out.last_rel_change = rel_change(out.value, f_next);
    out.x = next;
    out.value = f_next;
    out.gradient = g_next;
  }
  out.converged = out.gradient.norm() < options.gradient_tol && out.last_rel_change < options.value_rel_tol;
  return out;
}

}  // namespace maxstab
