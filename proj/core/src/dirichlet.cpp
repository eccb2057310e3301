#include <algorithm>
#include <cmath>

#include "maxstab/error.hpp"
#include "model_factories.hpp"

namespace maxstab::detail {

namespace {

class DirichletModel final : public Model {
 public:
  DirichletModel(const ParamVector& params, const ModelOptions& options) : Model(params, options) {
    const Eigen::VectorXd& alpha = params.alpha();
    const double total = alpha.sum();
    log_const_ = std::lgamma(total + 1.0);
    for (double a : alpha) log_const_ += a * std::log(a) - std::lgamma(a);
    const double smallest = alpha.minCoeff();
    log_width_ = kLogTruncation * std::max(1.0, 1.0 / smallest);
    quad_.rel_tol = options.quadrature_rel_tol;
    quad_.abs_tol = 1e-300;
  }

  double exponent(std::span<const double> z) const override {
    check_point(z);
    require_small();
    return exponent_from_faces(dim(), z, false, density_fn(), quad_, log_width_);
  }

  double block_derivative(std::span<const double> z, SubsetIndicator s) const override {
    check_point(z);
    check_subset(s);
    require_small();
    for (double v : z) require(std::isfinite(v), ErrorCode::NonFinite, "block derivatives need finite points");
    const double value = block_from_density(dim(), z, s, density_fn(), quad_, log_width_);
    require(value >= 0.0, ErrorCode::NegativeDensityTerm, "negative Dirichlet block derivative");
    return value;
  }

  bool has_angular_density() const override { return true; }

  // no mass on lower-dimensional faces
  double angular_density(std::span<const double> w, SubsetIndicator face) const override {
    check_face(w, face);
    if (face != full_set(dim())) return 0.0;
    return density(w) / dim();
  }

  bool has_pj_sampler() const override { return true; }

  void sample_pj(int j, RngStream& rng, std::span<double> y) const override {
    require(j >= 0 && j < dim(), ErrorCode::InvalidArgument, "anchor index out of range");
    const Eigen::VectorXd& alpha = params().alpha();
    const double xj = rng.gamma(alpha(j) + 1.0) / alpha(j);
    for (int i = 0; i < dim(); ++i) {
      y[static_cast<std::size_t>(i)] = i == j ? 1.0 : (rng.gamma(alpha(i)) / alpha(i)) / xj;
    }
  }

 private:
  // exponent-measure density on the interior:
  //   Gamma(A+1) prod_i alpha_i^alpha_i y_i^(alpha_i-1) / Gamma(alpha_i) * (sum_j alpha_j y_j)^(-A-1)
  double density(std::span<const double> y) const {
    const Eigen::VectorXd& alpha = params().alpha();
    double log_value = log_const_;
    double linear = 0.0;
    for (int i = 0; i < dim(); ++i) {
      const double yi = y[static_cast<std::size_t>(i)];
      log_value += (alpha(i) - 1.0) * std::log(yi);
      linear += alpha(i) * yi;
    }
    log_value -= (alpha.sum() + 1.0) * std::log(linear);
    return std::exp(log_value);
  }

  FaceDensity density_fn() const {
    return [this](std::span<const double> y, SubsetIndicator) { return density(y); };
  }

  void require_small() const {
    require(dim() <= kMaxQuadratureModelDim, ErrorCode::DimensionTooLarge,
            "Dirichlet exponent and block derivatives are computed by quadrature for k <= 3");
  }

  double log_const_ = 0.0;
  double log_width_ = kLogTruncation;
  QuadratureOptions quad_;
};

}  // namespace

std::unique_ptr<Model> make_dirichlet(const ParamVector& params, const ModelOptions& options) {
  return std::make_unique<DirichletModel>(params, options);
}

}  // namespace maxstab::detail
