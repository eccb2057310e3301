#include <cmath>
#include <numbers>
#include <vector>

#include "maxstab/error.hpp"
#include "maxstab/linalg.hpp"
#include "maxstab/mvn.hpp"
#include "model_factories.hpp"

namespace maxstab::detail {

namespace {

// Gaussian pieces of D_S for one subset, anchored at its smallest index.
struct BlockPlan {
  int anchor = 0;
  std::vector<int> inside;   // S without the anchor
  std::vector<int> outside;  // complement of S
  Eigen::MatrixXd inside_chol_l;
  double inside_log_norm = 0.0;  // log of the N(0, R_tt) normalizing constant
  Eigen::MatrixXd regression;    // R_ct R_tt^-1
  Eigen::MatrixXd conditional;   // R_cc - R_ct R_tt^-1 R_tc
};

class HueslerReissModel final : public Model {
 public:
  HueslerReissModel(const ParamVector& params, const ModelOptions& options) : Model(params, options) {
    const int k = dim();
    const Eigen::MatrixXd& l2 = params.lambda2();
    full_r_.reserve(static_cast<std::size_t>(k));
    chol_.reserve(static_cast<std::size_t>(k));
    for (int a = 0; a < k; ++a) {
      full_r_.push_back(hr_r_matrix_full(l2, a));
      if (k > 1) {
        Eigen::LLT<Eigen::MatrixXd> llt(hr_r_matrix(l2, a));
        require(llt.info() == Eigen::Success, ErrorCode::NotConditionallyNegativeDefinite,
                "R matrix is not positive definite");
        chol_.push_back(llt.matrixL());
      } else {
        chol_.emplace_back(0, 0);
      }
    }
    const SubsetIndicator full = full_set(k);
    plans_.resize(static_cast<std::size_t>(full) + 1);
    for (SubsetIndicator s = 1; s <= full; ++s) plans_[s] = plan(s);
  }

  double exponent(std::span<const double> z) const override {
    check_point(z);
    double total = 0.0;
    for (int i = 0; i < dim(); ++i) {
      const double zi = z[static_cast<std::size_t>(i)];
      if (std::isinf(zi)) continue;
      total += zi * evaluate(z, SubsetIndicator{1} << i);
    }
    return total;
  }

  double block_derivative(std::span<const double> z, SubsetIndicator s) const override {
    check_point(z);
    check_subset(s);
    for (double v : z) require(std::isfinite(v), ErrorCode::NonFinite, "block derivatives need finite points");
    return evaluate(z, s);
  }

  bool has_pj_sampler() const override { return true; }

  void sample_pj(int j, RngStream& rng, std::span<double> y) const override {
    require(j >= 0 && j < dim(), ErrorCode::InvalidArgument, "anchor index out of range");
    const int k = dim();
    const Eigen::MatrixXd& l2 = params().lambda2();
    Eigen::VectorXd g(k - 1);
    for (Eigen::Index a = 0; a < k - 1; ++a) g(a) = rng.standard_normal();
    const Eigen::VectorXd x = chol_[static_cast<std::size_t>(j)] * g;
    Eigen::Index pos = 0;
    for (int i = 0; i < k; ++i) {
      if (i == j) {
        y[static_cast<std::size_t>(i)] = 1.0;
      } else {
        y[static_cast<std::size_t>(i)] = std::exp(x(pos++) - 2.0 * l2(i, j));
      }
    }
  }

 private:
  BlockPlan plan(SubsetIndicator s) const {
    BlockPlan p;
    const int k = dim();
    p.anchor = std::countr_zero(s);
    for (int i = 0; i < k; ++i) {
      if (i == p.anchor) continue;
      (contains(s, i) ? p.inside : p.outside).push_back(i);
    }
    const Eigen::MatrixXd& r = full_r_[static_cast<std::size_t>(p.anchor)];
    auto block = [&](const std::vector<int>& rows, const std::vector<int>& cols) {
      Eigen::MatrixXd m(rows.size(), cols.size());
      for (std::size_t a = 0; a < rows.size(); ++a)
        for (std::size_t b = 0; b < cols.size(); ++b) m(a, b) = r(rows[a], cols[b]);
      return m;
    };
    const Eigen::MatrixXd rtt = block(p.inside, p.inside);
    const Eigen::MatrixXd rct = block(p.outside, p.inside);
    const Eigen::MatrixXd rcc = block(p.outside, p.outside);
    if (p.inside.empty()) {
      p.regression = Eigen::MatrixXd::Zero(rcc.rows(), 0);
      p.conditional = rcc;
      return p;
    }
    Eigen::LLT<Eigen::MatrixXd> llt(rtt);
    require(llt.info() == Eigen::Success, ErrorCode::NotConditionallyNegativeDefinite,
            "R block is not positive definite");
    p.inside_chol_l = llt.matrixL();
    const double log_det = 2.0 * p.inside_chol_l.diagonal().array().log().sum();
    p.inside_log_norm = -0.5 * log_det - 0.5 * static_cast<double>(p.inside.size()) * std::log(2.0 * std::numbers::pi);
    p.regression = llt.solve(rct.transpose()).transpose();
    p.conditional = rcc - p.regression * rct.transpose();
    p.conditional = 0.5 * (p.conditional + p.conditional.transpose()).eval();
    return p;
  }

  double evaluate(std::span<const double> z, SubsetIndicator s) const {
    const BlockPlan& p = plans_[s];
    const Eigen::MatrixXd& l2 = params().lambda2();
    const double z0 = z[static_cast<std::size_t>(p.anchor)];
    auto zstar = [&](int j) { return std::log(z[static_cast<std::size_t>(j)] / z0) + 2.0 * l2(j, p.anchor); };

    double log_prefactor = -2.0 * std::log(z0);
    Eigen::VectorXd t(static_cast<Eigen::Index>(p.inside.size()));
    for (std::size_t a = 0; a < p.inside.size(); ++a) {
      t(static_cast<Eigen::Index>(a)) = zstar(p.inside[a]);
      log_prefactor -= std::log(z[static_cast<std::size_t>(p.inside[a])]);
    }
    if (!p.inside.empty()) {
      const Eigen::VectorXd solved = p.inside_chol_l.triangularView<Eigen::Lower>().solve(t);
      log_prefactor += p.inside_log_norm - 0.5 * solved.squaredNorm();
    }
    double cdf = 1.0;
    if (!p.outside.empty()) {
      const Eigen::VectorXd mean = p.regression * t;
      std::vector<double> upper(p.outside.size());
      for (std::size_t a = 0; a < p.outside.size(); ++a) {
        upper[a] = zstar(p.outside[a]) - mean(static_cast<Eigen::Index>(a));
      }
      const CdfResult res = mvn_cdf(upper, p.conditional, options().cdf_accuracy);
      require(res.converged, ErrorCode::CdfNotConverged, "normal CDF did not reach the requested accuracy");
      cdf = res.value;
    }
    const double value = std::exp(log_prefactor) * cdf;
    require(value >= 0.0, ErrorCode::NegativeDensityTerm, "negative Huesler-Reiss block derivative");
    return value;
  }

  std::vector<Eigen::MatrixXd> full_r_;
  std::vector<Eigen::MatrixXd> chol_;
  std::vector<BlockPlan> plans_;
};

}  // namespace

std::unique_ptr<Model> make_huesler_reiss(const ParamVector& params, const ModelOptions& options) {
  return std::make_unique<HueslerReissModel>(params, options);
}

}  // namespace maxstab::detail
