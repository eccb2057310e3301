#include <cmath>
#include <vector>

#include "maxstab/error.hpp"
#include "maxstab/logistic.hpp"
#include "model_factories.hpp"

namespace maxstab::detail {

namespace {

class LogisticModel final : public Model {
 public:
  using Model::Model;

  double exponent(std::span<const double> z) const override {
    check_point(z);
    bool all_infinite = true;
    for (double v : z) all_infinite = all_infinite && std::isinf(v);
    if (all_infinite) return 0.0;
    return std::exp(logistic::log_exponent(params().theta(), z));
  }

  double block_derivative(std::span<const double> z, SubsetIndicator s) const override {
    check_point(z);
    check_subset(s);
    return std::exp(logistic::log_block(params().theta(), z, s));
  }

  std::vector<double> log_block_derivatives(std::span<const double> z) const override {
    check_point(z);
    const SubsetIndicator full = full_set(dim());
    std::vector<double> out(static_cast<std::size_t>(full) + 1, 0.0);
    for (SubsetIndicator s = 1; s <= full; ++s) out[s] = logistic::log_block(params().theta(), z, s);
    return out;
  }

  bool has_pj_sampler() const override { return true; }

  // Y_i = (G / E_i)^theta with G ~ Gamma(1 - theta) shared and E_i ~ Exp(1).
  void sample_pj(int j, RngStream& rng, std::span<double> y) const override {
    require(j >= 0 && j < dim(), ErrorCode::InvalidArgument, "anchor index out of range");
    const double theta = params().theta();
    const double g = rng.gamma(1.0 - theta);
    for (int i = 0; i < dim(); ++i) {
      y[static_cast<std::size_t>(i)] = i == j ? 1.0 : std::pow(g / rng.exponential(), theta);
    }
  }
};

}  // namespace

std::unique_ptr<Model> make_logistic(const ParamVector& params, const ModelOptions& options) {
  return std::make_unique<LogisticModel>(params, options);
}

}  // namespace maxstab::detail
