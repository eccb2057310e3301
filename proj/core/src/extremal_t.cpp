#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include <boost/math/distributions/students_t.hpp>

#include "maxstab/error.hpp"
#include "maxstab/mvn.hpp"
#include "model_factories.hpp"

namespace maxstab::detail {

namespace {

// Gaussian blocks of one face I: Sigma_I, regression of I^c on I, and the
// conditional covariance of I^c given I.
struct FacePlan {
  std::vector<int> inside;
  std::vector<int> outside;
  Eigen::MatrixXd inside_chol_l;
  double log_det = 0.0;
  Eigen::MatrixXd regression;
  Eigen::MatrixXd conditional;
};

class ExtremalTModel final : public Model {
 public:
  ExtremalTModel(const ParamVector& params, const ModelOptions& options) : Model(params, options) {
    const double nu = params.nu();
    log_c_ = 0.5 * std::log(std::numbers::pi) + (1.0 - 0.5 * nu) * std::log(2.0) - std::lgamma(0.5 * (nu + 1.0));
    log_width_ = kLogTruncation * std::max(1.0, nu);
    quad_.rel_tol = options.quadrature_rel_tol;
    quad_.abs_tol = 1e-300;
    const SubsetIndicator full = full_set(dim());
    plans_.resize(static_cast<std::size_t>(full) + 1);
    for (SubsetIndicator face = 1; face <= full; ++face) plans_[face] = plan(face);
    vertex_.assign(static_cast<std::size_t>(dim()), 1.0);
    for (int i = 0; i < dim(); ++i) {
      std::vector<double> e(static_cast<std::size_t>(dim()), 0.0);
      e[static_cast<std::size_t>(i)] = 1.0;
      vertex_[static_cast<std::size_t>(i)] = face_density(e, SubsetIndicator{1} << i);
    }
  }

  double exponent(std::span<const double> z) const override {
    check_point(z);
    require(dim() <= kMaxQuadratureModelDim, ErrorCode::DimensionTooLarge,
            "extremal-t exponent is computed by quadrature for k <= 3");
    auto density = [this](std::span<const double> y, SubsetIndicator face) {
      if (subset_size(face) == 1) return vertex_[static_cast<std::size_t>(std::countr_zero(face))];
      return face_density(y, face);
    };
    return exponent_from_faces(dim(), z, true, density, quad_, log_width_);
  }

  bool has_block_derivatives() const override { return false; }

  bool has_angular_density() const override { return true; }

  double angular_density(std::span<const double> w, SubsetIndicator face) const override {
    check_face(w, face);
    if (subset_size(face) == 1) return vertex_[static_cast<std::size_t>(std::countr_zero(face))] / dim();
    return face_density(w, face) / dim();
  }

 private:
  FacePlan plan(SubsetIndicator face) const {
    FacePlan p;
    const Eigen::MatrixXd& sigma = params().sigma();
    for (int i = 0; i < dim(); ++i) (contains(face, i) ? p.inside : p.outside).push_back(i);
    auto block = [&](const std::vector<int>& rows, const std::vector<int>& cols) {
      Eigen::MatrixXd m(rows.size(), cols.size());
      for (std::size_t a = 0; a < rows.size(); ++a)
        for (std::size_t b = 0; b < cols.size(); ++b) m(a, b) = sigma(rows[a], cols[b]);
      return m;
    };
    const Eigen::MatrixXd sii = block(p.inside, p.inside);
    const Eigen::MatrixXd sci = block(p.outside, p.inside);
    Eigen::LLT<Eigen::MatrixXd> llt(sii);
    require(llt.info() == Eigen::Success, ErrorCode::NotPositiveDefinite, "Sigma block is not positive definite");
    p.inside_chol_l = llt.matrixL();
    p.log_det = 2.0 * p.inside_chol_l.diagonal().array().log().sum();
    p.regression = llt.solve(sci.transpose()).transpose();
    p.conditional = block(p.outside, p.outside) - p.regression * sci.transpose();
    p.conditional = 0.5 * (p.conditional + p.conditional.transpose()).eval();
    return p;
  }

  // Exponent-measure density on the face I at y (zero off I):
  //   lambda_I(y) = lambda^(m)_{Sigma_I}(y_I) * E_T[ Phi_{|I^c|}(-sqrt(2T/q) A x0; Sigma_hat) ],
  // x0 = (y_I / c)^(1/nu), q = x0' Sigma_I^-1 x0, T ~ Gamma((nu + m)/2).
  double face_density(std::span<const double> y, SubsetIndicator face) const {
    const FacePlan& p = plans_[face];
    const double nu = params().nu();
    const auto m = static_cast<Eigen::Index>(p.inside.size());
    Eigen::VectorXd x0(m);
    double sum_log_y = 0.0;
    for (Eigen::Index a = 0; a < m; ++a) {
      const double ya = y[static_cast<std::size_t>(p.inside[static_cast<std::size_t>(a)])];
      sum_log_y += std::log(ya);
      x0(a) = std::exp((std::log(ya) - log_c_) / nu);
    }
    const Eigen::VectorXd solved = p.inside_chol_l.triangularView<Eigen::Lower>().solve(x0);
    const double q = solved.squaredNorm();
    const double md = static_cast<double>(m);
    const double shape = 0.5 * (nu + md);
    double log_value = (1.0 - md) * std::log(nu) - (md / nu) * log_c_ + (1.0 / nu - 1.0) * sum_log_y -
                       0.5 * md * std::log(2.0 * std::numbers::pi) - 0.5 * p.log_det - std::log(2.0) +
                       std::lgamma(shape) + shape * std::log(2.0 / q);
    double value = std::exp(log_value);
    if (p.outside.empty()) return value;
    const Eigen::VectorXd v = p.regression * x0 / std::sqrt(q);
    return value * lower_face_factor(v, p.conditional, shape);
  }

  // E_T[ Phi(-sqrt(2T) v; C) ] for T ~ Gamma(shape).
  double lower_face_factor(const Eigen::VectorXd& v, const Eigen::MatrixXd& cov, double shape) const {
    if (v.size() == 1) {
      const double sd = std::sqrt(cov(0, 0));
      boost::math::students_t dist(2.0 * shape);
      return boost::math::cdf(dist, -v(0) / sd * std::sqrt(2.0 * shape));
    }
    const double log_norm = std::lgamma(shape);
    const double lo = -kLogTruncation / shape - 5.0;
    const double hi = std::log(shape + 60.0 + 10.0 * std::sqrt(shape)) + 1.0;
    auto integrand = [&](std::span<const double> x) {
      const double t = std::exp(x[0]);
      const double weight = std::exp(shape * x[0] - t - log_norm);
      if (weight == 0.0) return 0.0;
      std::vector<double> upper(static_cast<std::size_t>(v.size()));
      for (Eigen::Index a = 0; a < v.size(); ++a) upper[static_cast<std::size_t>(a)] = -std::sqrt(2.0 * t) * v(a);
      const CdfResult r = mvn_cdf(upper, cov, options().cdf_accuracy);
      return weight * r.value;
    };
    const double lower[1] = {lo};
    const double upper[1] = {hi};
    QuadratureOptions opts;
    opts.rel_tol = 1e-10;
    opts.abs_tol = 1e-300;
    return integrate_box(integrand, lower, upper, opts).value;
  }

  double log_c_ = 0.0;
  double log_width_ = kLogTruncation;
  QuadratureOptions quad_;
  std::vector<FacePlan> plans_;
  std::vector<double> vertex_;
};

}  // namespace

std::unique_ptr<Model> make_extremal_t(const ParamVector& params, const ModelOptions& options) {
  return std::make_unique<ExtremalTModel>(params, options);
}

}  // namespace maxstab::detail
