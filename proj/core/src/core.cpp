#include "maxstab/core.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "maxstab/linalg.hpp"

namespace maxstab {

namespace {

constexpr double kExpClamp = 700.0;
// smallest eigenvalue kept by from_unconstrained for matrix parameters
constexpr double kSaturationEigen = 1e-8;
// Huesler-Reiss factor entries are clamped so R^(1) stays within a range
// where its smallest eigenvalue can be resolved against kSaturationEigen
constexpr double kFactorClamp = 1e3;
constexpr double kLogDiagClamp = 14.0;

bool all_finite(const Eigen::MatrixXd& m) { return m.allFinite(); }

void require_finite(const Eigen::VectorXd& v) {
  require(v.allFinite(), ErrorCode::NonFinite, "unconstrained vector has NaN or infinite entries");
}

double safe_exp(double x) { return std::exp(std::clamp(x, -kExpClamp, kExpClamp)); }

// Logistic theta lives on (lo, hi); the unconstrained coordinate is the logit of
// the rescaled value.
constexpr double kThetaLo = kLogisticBoundary;
constexpr double kThetaHi = 1.0 - kLogisticBoundary;

double theta_from_v(double v) {
  const double s = 1.0 / (1.0 + std::exp(-v));
  double theta = kThetaLo + (kThetaHi - kThetaLo) * s;
  // saturate at the nearest representable interior point
  theta = std::clamp(theta, std::nextafter(kThetaLo, 1.0), std::nextafter(kThetaHi, 0.0));
  return theta;
}

double v_from_theta(double theta) {
  const double s = (theta - kThetaLo) / (kThetaHi - kThetaLo);
  return std::log(s) - std::log1p(-s);
}

}  // namespace

double logistic_theta_slope(double theta) {
  return (theta - kThetaLo) * (kThetaHi - theta) / (kThetaHi - kThetaLo);
}

std::string_view to_string(ModelId model) noexcept {
  switch (model) {
    case ModelId::logistic: return "logistic";
    case ModelId::dirichlet: return "dirichlet";
    case ModelId::huesler_reiss: return "huesler_reiss";
    case ModelId::extremal_t: return "extremal_t";
  }
  return "unknown";
}

ModelId parse_model_id(std::string_view name) {
  if (name == "logistic") return ModelId::logistic;
  if (name == "dirichlet") return ModelId::dirichlet;
  if (name == "huesler_reiss" || name == "husler_reiss" || name == "hr") return ModelId::huesler_reiss;
  if (name == "extremal_t") return ModelId::extremal_t;
  fail(ErrorCode::InvalidArgument, "unknown model '" + std::string(name) + "'");
}

// ---------------------------------------------------------------------------
// ParamVector

ParamVector ParamVector::logistic(int dim, double theta) {
  require(dim >= 1, ErrorCode::ShapeMismatch, "logistic dimension must be >= 1");
  require(std::isfinite(theta), ErrorCode::NonFinite, "logistic theta is not finite");
  require(theta > kThetaLo && theta < kThetaHi, ErrorCode::OutOfDomain,
          "logistic theta must lie in (0,1) at least 1e-8 away from the boundary");
  ParamVector p;
  p.model_ = ModelId::logistic;
  p.dim_ = dim;
  p.scalar_ = theta;
  return p;
}

ParamVector ParamVector::dirichlet(Eigen::VectorXd alpha) {
  require(alpha.size() >= 1, ErrorCode::ShapeMismatch, "dirichlet alpha must be non-empty");
  require(alpha.allFinite(), ErrorCode::NonFinite, "dirichlet alpha is not finite");
  require((alpha.array() > 0.0).all(), ErrorCode::OutOfDomain, "dirichlet alpha must be positive");
  ParamVector p;
  p.model_ = ModelId::dirichlet;
  p.dim_ = static_cast<int>(alpha.size());
  p.vector_ = std::move(alpha);
  return p;
}

ParamVector ParamVector::huesler_reiss(Eigen::MatrixXd lambda2) {
  require(lambda2.rows() == lambda2.cols() && lambda2.rows() >= 1, ErrorCode::ShapeMismatch,
          "Huesler-Reiss Lambda must be a non-empty square matrix");
  require(all_finite(lambda2), ErrorCode::NonFinite, "Huesler-Reiss Lambda is not finite");
  require(lambda2.diagonal().cwiseAbs().maxCoeff() == 0.0, ErrorCode::ShapeMismatch,
          "Huesler-Reiss Lambda must have a zero diagonal");
  require(is_symmetric(lambda2), ErrorCode::ShapeMismatch, "Huesler-Reiss Lambda must be symmetric");
  const auto k = lambda2.rows();
  for (Eigen::Index i = 0; i < k; ++i)
    for (Eigen::Index j = i + 1; j < k; ++j)
      require(lambda2(i, j) > 0.0, ErrorCode::OutOfDomain,
              "Huesler-Reiss off-diagonal entries must be positive");
  if (k >= 2) {
    require(check_cnd(lambda2), ErrorCode::NotConditionallyNegativeDefinite,
            "Lambda is not strictly conditionally negative definite");
  }
  // exact symmetry
  lambda2 = 0.5 * (lambda2 + lambda2.transpose()).eval();
  ParamVector p;
  p.model_ = ModelId::huesler_reiss;
  p.dim_ = static_cast<int>(k);
  p.matrix_ = std::move(lambda2);
  return p;
}

ParamVector ParamVector::extremal_t(Eigen::MatrixXd sigma, double nu) {
  require(sigma.rows() == sigma.cols() && sigma.rows() >= 1, ErrorCode::ShapeMismatch,
          "extremal-t Sigma must be a non-empty square matrix");
  require(all_finite(sigma) && std::isfinite(nu), ErrorCode::NonFinite,
          "extremal-t parameters are not finite");
  require(nu > 0.0, ErrorCode::OutOfDomain, "extremal-t nu must be positive");
  require(is_symmetric(sigma), ErrorCode::ShapeMismatch, "extremal-t Sigma must be symmetric");
  require((sigma.diagonal().array() - 1.0).abs().maxCoeff() <= 1e-12, ErrorCode::OutOfDomain,
          "extremal-t Sigma must have a unit diagonal");
  require(min_eigenvalue(sigma) > kStrictEigenThreshold, ErrorCode::NotPositiveDefinite,
          "extremal-t Sigma must be positive definite");
  sigma = 0.5 * (sigma + sigma.transpose()).eval();
  sigma.diagonal().setOnes();
  ParamVector p;
  p.model_ = ModelId::extremal_t;
  p.dim_ = static_cast<int>(sigma.rows());
  p.matrix_ = std::move(sigma);
  p.scalar_ = nu;
  return p;
}

double ParamVector::theta() const {
  require(model_ == ModelId::logistic, ErrorCode::UnsupportedModel, "theta is a logistic parameter");
  return scalar_;
}

const Eigen::VectorXd& ParamVector::alpha() const {
  require(model_ == ModelId::dirichlet, ErrorCode::UnsupportedModel, "alpha is a dirichlet parameter");
  return vector_;
}

const Eigen::MatrixXd& ParamVector::lambda2() const {
  require(model_ == ModelId::huesler_reiss, ErrorCode::UnsupportedModel,
          "lambda2 is a Huesler-Reiss parameter");
  return matrix_;
}

const Eigen::MatrixXd& ParamVector::sigma() const {
  require(model_ == ModelId::extremal_t, ErrorCode::UnsupportedModel, "sigma is an extremal-t parameter");
  return matrix_;
}

double ParamVector::nu() const {
  require(model_ == ModelId::extremal_t, ErrorCode::UnsupportedModel, "nu is an extremal-t parameter");
  return scalar_;
}

Eigen::VectorXd ParamVector::natural() const {
  switch (model_) {
    case ModelId::logistic: return Eigen::VectorXd::Constant(1, scalar_);
    case ModelId::dirichlet: return vector_;
    case ModelId::huesler_reiss:
    case ModelId::extremal_t: {
      const int k = dim_;
      const int pairs = k * (k - 1) / 2;
      Eigen::VectorXd out(pairs + (model_ == ModelId::extremal_t ? 1 : 0));
      int idx = 0;
      for (int i = 0; i < k; ++i)
        for (int j = i + 1; j < k; ++j) out(idx++) = matrix_(i, j);
      if (model_ == ModelId::extremal_t) out(idx) = scalar_;
      return out;
    }
  }
  return {};
}

std::vector<std::string> ParamVector::natural_names() const {
  std::vector<std::string> names;
  switch (model_) {
    case ModelId::logistic: names.emplace_back("theta"); break;
    case ModelId::dirichlet:
      for (int i = 0; i < dim_; ++i) names.push_back("alpha_" + std::to_string(i + 1));
      break;
    case ModelId::huesler_reiss:
    case ModelId::extremal_t: {
      const std::string stem = model_ == ModelId::huesler_reiss ? "lambda2_" : "sigma_";
      for (int i = 0; i < dim_; ++i)
        for (int j = i + 1; j < dim_; ++j)
          names.push_back(stem + std::to_string(i + 1) + "_" + std::to_string(j + 1));
      if (model_ == ModelId::extremal_t) names.emplace_back("nu");
      break;
    }
  }
  return names;
}

bool operator==(const ParamVector& a, const ParamVector& b) {
  if (a.model_ != b.model_ || a.dim_ != b.dim_) return false;
  return a.scalar_ == b.scalar_ && a.vector_ == b.vector_ && a.matrix_ == b.matrix_;
}

ParamVector validate_params(const RawParams& raw) {
  switch (raw.model) {
    case ModelId::logistic:
      require(raw.theta.has_value(), ErrorCode::ShapeMismatch, "logistic payload needs theta");
      return ParamVector::logistic(raw.dim, *raw.theta);
    case ModelId::dirichlet:
      require(raw.alpha.has_value(), ErrorCode::ShapeMismatch, "dirichlet payload needs alpha");
      require(raw.dim == 0 || raw.alpha->size() == raw.dim, ErrorCode::ShapeMismatch,
              "dirichlet alpha length does not match the dimension");
      return ParamVector::dirichlet(*raw.alpha);
    case ModelId::huesler_reiss:
      require(raw.matrix.has_value(), ErrorCode::ShapeMismatch, "Huesler-Reiss payload needs lambda2");
      require(raw.dim == 0 || raw.matrix->rows() == raw.dim, ErrorCode::ShapeMismatch,
              "lambda2 size does not match the dimension");
      return ParamVector::huesler_reiss(*raw.matrix);
    case ModelId::extremal_t:
      require(raw.matrix.has_value() && raw.nu.has_value(), ErrorCode::ShapeMismatch,
              "extremal-t payload needs sigma and nu");
      require(raw.dim == 0 || raw.matrix->rows() == raw.dim, ErrorCode::ShapeMismatch,
              "sigma size does not match the dimension");
      return ParamVector::extremal_t(*raw.matrix, *raw.nu);
  }
  fail(ErrorCode::InvalidArgument, "unknown model");
}

int param_count(ModelId model, int dim) {
  switch (model) {
    case ModelId::logistic: return 1;
    case ModelId::dirichlet: return dim;
    case ModelId::huesler_reiss: return dim * (dim - 1) / 2;
    case ModelId::extremal_t: return dim * (dim - 1) / 2 + 1;
  }
  return 0;
}

// ---------------------------------------------------------------------------
// unconstrained coordinates

Eigen::VectorXd to_unconstrained(const ParamVector& p) {
  const int k = p.dim();
  Eigen::VectorXd v(param_count(p.model(), k));
  switch (p.model()) {
    case ModelId::logistic:
      v(0) = v_from_theta(p.theta());
      break;
    case ModelId::dirichlet:
      v = p.alpha().array().log();
      break;
    case ModelId::huesler_reiss: {
      if (k < 2) break;
      const Eigen::MatrixXd m = hr_r_matrix(p.lambda2(), 0) / 4.0;
      const Eigen::MatrixXd l = m.llt().matrixL();
      int idx = 0;
      for (int i = 0; i < k - 1; ++i) {
        for (int j = 0; j < i; ++j) v(idx++) = l(i, j);
        v(idx++) = 2.0 * std::log(l(i, i));
      }
      break;
    }
    case ModelId::extremal_t: {
      const Eigen::MatrixXd l = p.sigma().llt().matrixL();
      int idx = 0;
      for (int i = 1; i < k; ++i) {
        double remaining = 1.0;
        for (int j = 0; j < i; ++j) {
          const double z = l(i, j) / std::sqrt(remaining);
          v(idx++) = std::atanh(z);
          remaining -= l(i, j) * l(i, j);
        }
      }
      v(idx) = std::log(p.nu());
      break;
    }
  }
  return v;
}

ParamVector from_unconstrained(ModelId model, int dim, const Eigen::VectorXd& v) {
  require_finite(v);
  require(dim >= 1, ErrorCode::ShapeMismatch, "dimension must be >= 1");
  require(v.size() == param_count(model, dim), ErrorCode::ShapeMismatch,
          "unconstrained vector has the wrong length");
  switch (model) {
    case ModelId::logistic:
      return ParamVector::logistic(dim, theta_from_v(v(0)));
    case ModelId::dirichlet:
      return ParamVector::dirichlet(v.unaryExpr([](double x) { return safe_exp(x); }));
    case ModelId::huesler_reiss: {
      const int k = dim;
      if (k == 1) return ParamVector::huesler_reiss(Eigen::MatrixXd::Zero(1, 1));
      Eigen::MatrixXd l = Eigen::MatrixXd::Zero(k - 1, k - 1);
      int idx = 0;
      for (int i = 0; i < k - 1; ++i) {
        for (int j = 0; j < i; ++j) l(i, j) = std::clamp(v(idx++), -kFactorClamp, kFactorClamp);
        l(i, i) = std::exp(0.5 * std::clamp(v(idx++), -kLogDiagClamp, kLogDiagClamp));
      }
      Eigen::MatrixXd m = l * l.transpose();
      // saturate instead of leaving the domain when the factor is nearly singular
      const double lo = min_eigenvalue(m);
      if (lo < kSaturationEigen) m.diagonal().array() += kSaturationEigen - lo;
      // m(j,l) = (l2_0j + l2_0l - l2_jl) / 2 over indices shifted by one
      Eigen::MatrixXd lambda2 = Eigen::MatrixXd::Zero(k, k);
      for (int a = 1; a < k; ++a) {
        lambda2(0, a) = lambda2(a, 0) = m(a - 1, a - 1);
      }
      for (int a = 1; a < k; ++a)
        for (int b = a + 1; b < k; ++b)
          lambda2(a, b) = lambda2(b, a) = m(a - 1, a - 1) + m(b - 1, b - 1) - 2.0 * m(a - 1, b - 1);
      return ParamVector::huesler_reiss(std::move(lambda2));
    }
    case ModelId::extremal_t: {
      const int k = dim;
      Eigen::MatrixXd l = Eigen::MatrixXd::Zero(k, k);
      l(0, 0) = 1.0;
      int idx = 0;
      for (int i = 1; i < k; ++i) {
        double remaining = 1.0;
        for (int j = 0; j < i; ++j) {
          const double z = std::tanh(v(idx++));
          l(i, j) = z * std::sqrt(std::max(remaining, 0.0));
          remaining -= l(i, j) * l(i, j);
        }
        l(i, i) = std::sqrt(std::max(remaining, 0.0));
      }
      Eigen::MatrixXd sigma = l * l.transpose();
      sigma.diagonal().setOnes();
      const double lo = min_eigenvalue(sigma);
      if (lo < kSaturationEigen) {
        const double shift = (kSaturationEigen - lo) / (1.0 - kSaturationEigen);
        sigma = (sigma + shift * Eigen::MatrixXd::Identity(k, k)) / (1.0 + shift);
        sigma.diagonal().setOnes();
      }
      return ParamVector::extremal_t(std::move(sigma), safe_exp(v(idx)));
    }
  }
  fail(ErrorCode::InvalidArgument, "unknown model");
}

// ---------------------------------------------------------------------------
// data

void validate_observation(std::span<const double> z) {
  for (double x : z) {
    require(std::isfinite(x), ErrorCode::NonFinite, "observation has a non-finite component");
    require(x > 0.0, ErrorCode::OutOfDomain, "observation components must be strictly positive");
  }
}

Dataset::Dataset(Matrix rows) : rows_(std::move(rows)) {
  require(rows_.rows() >= 1, ErrorCode::EmptyData, "dataset must contain at least one row");
  require(rows_.cols() >= 1, ErrorCode::ShapeMismatch, "dataset rows must have at least one column");
  for (int i = 0; i < size(); ++i) validate_observation(row(i));
}

Dataset Dataset::from_rows(const std::vector<Observation>& rows) {
  require(!rows.empty(), ErrorCode::EmptyData, "dataset must contain at least one row");
  const auto k = rows.front().size();
  Matrix m(static_cast<Eigen::Index>(rows.size()), k);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    require(rows[i].size() == k, ErrorCode::ShapeMismatch, "dataset rows differ in dimension");
    m.row(static_cast<Eigen::Index>(i)) = rows[i].transpose();
  }
  return Dataset(std::move(m));
}

}  // namespace maxstab
