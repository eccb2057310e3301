#include "maxstab/mvn.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <vector>

#include "maxstab/error.hpp"
#include "maxstab/linalg.hpp"
#include "maxstab/quadrature.hpp"
#include "maxstab/rng.hpp"
#include "maxstab/special.hpp"

namespace maxstab {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kCorrelationClamp = 1.0 - 1e-10;
constexpr std::array<int, kMaxMvnDim> kPrimes{2, 3, 5, 7, 11, 13, 17, 19, 23, 29};

struct Prioritized {
  Eigen::MatrixXd chol;   // lower-triangular factor in integration order
  Eigen::VectorXd upper;  // limits in integration order
};

// Cholesky factorization with Genz's variable prioritization: at each step pick
// the remaining variable with the smallest conditional probability, using the
// truncated-normal mean of the variables already placed.
Prioritized prioritize(Eigen::MatrixXd cov, Eigen::VectorXd upper) {
  const auto p = cov.rows();
  Eigen::MatrixXd l = Eigen::MatrixXd::Zero(p, p);
  Eigen::VectorXd y = Eigen::VectorXd::Zero(p);
  for (Eigen::Index i = 0; i < p; ++i) {
    Eigen::Index best = i;
    double best_prob = kInf;
    for (Eigen::Index j = i; j < p; ++j) {
      double s = 0.0, v = cov(j, j);
      for (Eigen::Index m = 0; m < i; ++m) {
        s += l(j, m) * y(m);
        v -= l(j, m) * l(j, m);
      }
      if (v <= 0.0) fail(ErrorCode::NotSPD, "covariance matrix is not positive definite");
      const double prob = normal_cdf((upper(j) - s) / std::sqrt(v));
      if (prob < best_prob) {
        best_prob = prob;
        best = j;
      }
    }
    if (best != i) {
      cov.row(i).swap(cov.row(best));
      cov.col(i).swap(cov.col(best));
      std::swap(upper(i), upper(best));
      l.row(i).swap(l.row(best));
    }
    double v = cov(i, i);
    for (Eigen::Index m = 0; m < i; ++m) v -= l(i, m) * l(i, m);
    if (v <= 0.0) fail(ErrorCode::NotSPD, "covariance matrix is not positive definite");
    l(i, i) = std::sqrt(v);
    for (Eigen::Index r = i + 1; r < p; ++r) {
      double s = cov(r, i);
      for (Eigen::Index m = 0; m < i; ++m) s -= l(r, m) * l(i, m);
      l(r, i) = s / l(i, i);
    }
    double s = 0.0;
    for (Eigen::Index m = 0; m < i; ++m) s += l(i, m) * y(m);
    const double u = (upper(i) - s) / l(i, i);
    const double mass = std::max(normal_cdf(u), 1e-300);
    y(i) = -normal_pdf(u) / mass;
  }
  return {std::move(l), std::move(upper)};
}

double sov_integrand(const Prioritized& pr, std::span<const double> w, std::vector<double>& y) {
  const auto p = pr.chol.rows();
  double e = normal_cdf(pr.upper(0) / pr.chol(0, 0));
  double f = e;
  for (Eigen::Index i = 1; i < p; ++i) {
    const double target = std::clamp(w[static_cast<std::size_t>(i - 1)] * e, 1e-300, 1.0 - 1e-16);
    y[static_cast<std::size_t>(i - 1)] = normal_quantile(target);
    double s = 0.0;
    for (Eigen::Index m = 0; m < i; ++m) s += pr.chol(i, m) * y[static_cast<std::size_t>(m)];
    e = normal_cdf((pr.upper(i) - s) / pr.chol(i, i));
    f *= e;
    if (f == 0.0) break;
  }
  return f;
}

CdfResult lattice_estimate(const Prioritized& pr, const MvnOptions& options) {
  const auto p = pr.chol.rows();
  const auto dims = static_cast<std::size_t>(p - 1);
  const int shifts = std::max(options.randomizations, 2);

  std::array<double, kMaxMvnDim> generator{};
  for (std::size_t d = 0; d < dims; ++d) {
    const double root = std::sqrt(static_cast<double>(kPrimes[d]));
    generator[d] = root - std::floor(root);
  }
  RngStream rng(options.shift_seed, 0);
  std::vector<std::array<double, kMaxMvnDim>> shift(static_cast<std::size_t>(shifts));
  for (auto& s : shift)
    for (std::size_t d = 0; d < dims; ++d) s[d] = rng.uniform();

  std::vector<double> sums(static_cast<std::size_t>(shifts), 0.0);
  std::vector<double> y(dims + 1);
  std::array<double, kMaxMvnDim> w{};
  std::array<double, kMaxMvnDim> w_anti{};

  std::int64_t done = 0;
  std::int64_t target = 1024;
  CdfResult out;
  while (true) {
    for (std::size_t r = 0; r < sums.size(); ++r) {
      for (std::int64_t n = done + 1; n <= target; ++n) {
        for (std::size_t d = 0; d < dims; ++d) {
          double x = static_cast<double>(n) * generator[d] + shift[r][d];
          x -= std::floor(x);
          w[d] = std::abs(2.0 * x - 1.0);
          w_anti[d] = 1.0 - w[d];
        }
        sums[r] += 0.5 * (sov_integrand(pr, {w.data(), dims}, y) +
                          sov_integrand(pr, {w_anti.data(), dims}, y));
      }
    }
    done = target;
    double mean = 0.0;
    for (double s : sums) mean += s / static_cast<double>(done);
    mean /= static_cast<double>(shifts);
    double var = 0.0;
    for (double s : sums) {
      const double diff = s / static_cast<double>(done) - mean;
      var += diff * diff;
    }
    var /= static_cast<double>(shifts) * static_cast<double>(shifts - 1);
    out.value = std::clamp(mean, 0.0, 1.0);
    out.error_estimate = 3.0 * std::sqrt(var);
    if (out.error_estimate <= options.accuracy) {
      out.converged = true;
      return out;
    }
    if (target >= options.max_points_per_randomization) {
      out.converged = false;
      return out;
    }
    target = std::min(target * 2, options.max_points_per_randomization);
  }
}

// P(X <= b) = int_{-inf}^{b_0} phi(t) Phi_2(conditional limits; conditional correlation) dt,
// conditioning on the first coordinate.
CdfResult trivariate(const Eigen::MatrixXd& corr, const Eigen::VectorXd& b) {
  // condition on the coordinate with the smallest limit so the outer range is shortest
  Eigen::Index first = 0;
  b.minCoeff(&first);
  std::array<Eigen::Index, 2> rest{};
  for (Eigen::Index i = 0, r = 0; i < 3; ++i)
    if (i != first) rest[static_cast<std::size_t>(r++)] = i;
  const double r1 = corr(rest[0], first), r2 = corr(rest[1], first);
  const double s1 = std::sqrt(std::max(1.0 - r1 * r1, 1e-20));
  const double s2 = std::sqrt(std::max(1.0 - r2 * r2, 1e-20));
  const double rho = std::clamp((corr(rest[0], rest[1]) - r1 * r2) / (s1 * s2), -1.0, 1.0);
  const double b1 = b(rest[0]), b2 = b(rest[1]);
  auto f = [&](std::span<const double> t) {
    return normal_pdf(t[0]) * bivariate_normal_cdf((b1 - r1 * t[0]) / s1, (b2 - r2 * t[0]) / s2, rho);
  };
  const double lo[1] = {-38.5};
  const double hi[1] = {std::max(b(first), -38.5)};
  QuadratureOptions opts;
  opts.rel_tol = 1e-12;
  opts.abs_tol = 1e-300;
  const QuadratureResult r = integrate_box(f, lo, hi, opts);
  CdfResult out;
  out.value = std::clamp(r.value, 0.0, 1.0);
  out.error_estimate = r.error_estimate;
  return out;
}

}  // namespace

CdfResult mvn_cdf(std::span<const double> upper, const Eigen::MatrixXd& covariance, double accuracy) {
  MvnOptions options;
  options.accuracy = accuracy;
  return mvn_cdf(upper, covariance, options);
}

CdfResult mvn_cdf(std::span<const double> upper, const Eigen::MatrixXd& covariance,
                  const MvnOptions& options) {
  const auto p = static_cast<Eigen::Index>(upper.size());
  require(covariance.rows() == p && covariance.cols() == p, ErrorCode::ShapeMismatch,
          "covariance shape does not match the limit vector");
  require(p <= kMaxMvnDim, ErrorCode::DimensionTooLarge, "mvn_cdf supports at most 10 dimensions");
  require(covariance.allFinite(), ErrorCode::NonFinite, "covariance has non-finite entries");
  require(is_symmetric(covariance, 1e-10), ErrorCode::NotSPD, "covariance matrix is not symmetric");

  CdfResult out;
  std::vector<Eigen::Index> keep;
  for (Eigen::Index i = 0; i < p; ++i) {
    const double b = upper[static_cast<std::size_t>(i)];
    require(!std::isnan(b), ErrorCode::NonFinite, "upper limit is NaN");
    require(covariance(i, i) > 0.0, ErrorCode::NotSPD, "covariance has a non-positive variance");
    if (b == -kInf) {
      out.value = 0.0;
      return out;
    }
    if (b != kInf) keep.push_back(i);
  }
  const auto q = static_cast<Eigen::Index>(keep.size());
  if (q == 0) {
    out.value = 1.0;
    return out;
  }

  // standardize the retained block
  Eigen::MatrixXd corr(q, q);
  Eigen::VectorXd limits(q);
  for (Eigen::Index a = 0; a < q; ++a) {
    const double sa = std::sqrt(covariance(keep[a], keep[a]));
    limits(a) = upper[static_cast<std::size_t>(keep[a])] / sa;
    for (Eigen::Index b = 0; b < q; ++b) {
      corr(a, b) = covariance(keep[a], keep[b]) / (sa * std::sqrt(covariance(keep[b], keep[b])));
    }
    corr(a, a) = 1.0;
  }
  for (Eigen::Index a = 0; a < q; ++a) {
    for (Eigen::Index b = 0; b < q; ++b) {
      if (a != b && std::abs(corr(a, b)) > kCorrelationClamp) {
        corr(a, b) = std::copysign(kCorrelationClamp, corr(a, b));
        out.clamped_correlation = true;
      }
    }
  }

  if (q == 1) {
    out.value = normal_cdf(limits(0));
    return out;
  }
  if (q == 2) {
    if (std::abs(corr(0, 1)) >= 1.0) fail(ErrorCode::NotSPD, "covariance matrix is singular");
    out.value = bivariate_normal_cdf(limits(0), limits(1), corr(0, 1));
    return out;
  }
  Eigen::LLT<Eigen::MatrixXd> llt(corr);
  require(llt.info() == Eigen::Success, ErrorCode::NotSPD, "covariance matrix is not positive definite");
  if (q == 3) return trivariate(corr, limits);
  return lattice_estimate(prioritize(corr, limits), options);
}

double mvn_log_pdf(std::span<const double> x, const Eigen::MatrixXd& covariance) {
  const auto p = static_cast<Eigen::Index>(x.size());
  require(covariance.rows() == p && covariance.cols() == p, ErrorCode::ShapeMismatch,
          "covariance shape does not match the point");
  if (p == 0) return 0.0;
  Eigen::LLT<Eigen::MatrixXd> llt(covariance);
  require(llt.info() == Eigen::Success, ErrorCode::NotSPD, "covariance matrix is not positive definite");
  const Eigen::Map<const Eigen::VectorXd> v(x.data(), p);
  const Eigen::VectorXd solved = llt.matrixL().solve(v);
  const double log_det = 2.0 * llt.matrixL().toDenseMatrix().diagonal().array().log().sum();
  return -0.5 * solved.squaredNorm() - 0.5 * log_det - 0.5 * static_cast<double>(p) * std::log(2.0 * std::numbers::pi);
}

}  // namespace maxstab
