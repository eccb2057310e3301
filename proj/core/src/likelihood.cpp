#include "maxstab/likelihood.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <unsupported/Eigen/AutoDiff>

#include "maxstab/error.hpp"
#include "maxstab/finite_diff.hpp"
#include "maxstab/logistic.hpp"
#include "maxstab/parallel.hpp"
#include "maxstab/partitions.hpp"
#include "maxstab/summation.hpp"

namespace maxstab {

namespace {

using Dual = Eigen::AutoDiffScalar<Eigen::Matrix<double, 1, 1>>;

// d/dtheta log f for the logistic family, propagated through the partition
// recurrence with forward-mode dual numbers.
double logistic_dlogf_dtheta(double theta, std::span<const double> z) {
  const int k = static_cast<int>(z.size());
  const Dual t(theta, 1, 0);
  const SubsetIndicator full = full_set(k);
  const Dual log_v = logistic::log_exponent(t, z);
  std::vector<Dual> log_blocks(static_cast<std::size_t>(full) + 1, Dual(0.0));
  double top = -std::numeric_limits<double>::infinity();
  for (SubsetIndicator s = 1; s <= full; ++s) {
    log_blocks[s] = logistic::log_block(t, z, s);
    top = std::max(top, log_blocks[s].value());
  }
  // rescale each block by exp(-top |S|) so the sum stays representable
  std::vector<Dual> blocks(static_cast<std::size_t>(full) + 1, Dual(0.0));
  for (SubsetIndicator s = 1; s <= full; ++s) blocks[s] = exp(log_blocks[s] - top * subset_size(s));
  const Dual sum = sum_partition_products_generic<Dual>(blocks, k);
  const Dual log_f = -exp(log_v) + log(sum);
  return log_f.derivatives()(0);
}

bool exchangeable(const Model& model) {
  if (model.id() == ModelId::logistic) return true;
  if (model.id() == ModelId::dirichlet) {
    const Eigen::VectorXd& a = model.params().alpha();
    return (a.array() == a(0)).all();
  }
  return false;
}

}  // namespace

DensityBreakdown log_density(const Model& model, std::span<const double> z_in) {
  validate_observation(z_in);
  require(static_cast<int>(z_in.size()) == model.dim(), ErrorCode::ShapeMismatch,
          "observation has the wrong dimension");
  // exchangeable laws are evaluated at the sorted point so permuted inputs give identical bits
  std::vector<double> sorted;
  std::span<const double> z = z_in;
  if (exchangeable(model)) {
    sorted.assign(z_in.begin(), z_in.end());
    std::sort(sorted.begin(), sorted.end());
    z = sorted;
  }
  require(model.has_block_derivatives(), ErrorCode::UnsupportedModel,
          "the full density needs block derivatives, which this model does not provide");
  DensityBreakdown out;
  const int k = model.dim();
  out.exponent_value = model.exponent(z);
  out.block_values = model.block_derivatives(z);
  bool tiny = false;
  for (SubsetIndicator s = 1; s < out.block_values.size(); ++s) {
    const double b = out.block_values[s];
    require(std::isfinite(b), ErrorCode::NonFiniteBlockValue, "block derivative is not finite");
    require(b >= 0.0, ErrorCode::NegativeDensityTerm, "block derivative is negative");
    tiny = tiny || b < kLogSpaceThreshold;
  }
  if (tiny) {
    const std::vector<double> logs = model.log_block_derivatives(z);
    out.log_space = true;
    out.log_partition_sum = log_sum_partition_products(logs, k);
    out.partition_sum = std::exp(out.log_partition_sum);
    require(out.log_partition_sum > -std::numeric_limits<double>::infinity(), ErrorCode::NonPositivePartitionSum,
            "partition sum is zero");
  } else {
    out.partition_sum = sum_partition_products(out.block_values, k);
    require(out.partition_sum > 0.0, ErrorCode::NonPositivePartitionSum, "partition sum is not positive");
    out.log_partition_sum = std::log(out.partition_sum);
  }
  out.log_density = -out.exponent_value + out.log_partition_sum;
  return out;
}

DensityBreakdown log_density(const ParamVector& params, std::span<const double> z, const ModelOptions& options) {
  return log_density(*make_model(params, options), z);
}

std::vector<double> log_density_terms(const Model& model, const Dataset& data, int threads) {
  require(data.dim() == model.dim(), ErrorCode::ShapeMismatch, "dataset dimension does not match the model");
  std::vector<double> terms(static_cast<std::size_t>(data.size()));
  parallel_for(terms.size(), threads, [&](std::size_t i) {
    terms[i] = log_density(model, data.row(static_cast<int>(i))).log_density;
  });
  return terms;
}

double log_likelihood(const Model& model, const Dataset& data, int threads) {
  const std::vector<double> terms = log_density_terms(model, data, threads);
  const double total = exact_sum(terms);
  require(total > -std::numeric_limits<double>::infinity(), ErrorCode::LikelihoodUnderflow,
          "log-likelihood is -inf");
  require(!std::isnan(total), ErrorCode::NonFinite, "log-likelihood is NaN");
  return total;
}

double log_likelihood(const ParamVector& params, const Dataset& data, const LikelihoodOptions& options) {
  return log_likelihood(*make_model(params, options.model), data, options.threads);
}

Eigen::VectorXd score(const ParamVector& params, std::span<const double> z, ScoreMethod method,
                      const ModelOptions& options) {
  if (method == ScoreMethod::analytic) {
    require(params.model() == ModelId::logistic, ErrorCode::UnsupportedMethod,
            "the analytic score is implemented for the logistic family only");
    validate_observation(z);
    const double theta = params.theta();
    Eigen::VectorXd g(1);
    g(0) = logistic_dlogf_dtheta(theta, z) * logistic_theta_slope(theta);
    return g;
  }
  const ModelId id = params.model();
  const int k = params.dim();
  const Eigen::VectorXd v = to_unconstrained(params);
  auto f = [&](const Eigen::VectorXd& x) { return log_density(from_unconstrained(id, k, x), z, options).log_density; };
  return finite_diff_gradient(f, v);
}

Eigen::MatrixXd score_matrix(const ParamVector& params, const Dataset& data, ScoreMethod method,
                             const LikelihoodOptions& options) {
  const int d = param_count(params.model(), params.dim());
  Eigen::MatrixXd out(data.size(), d);
  parallel_for(static_cast<std::size_t>(data.size()), options.threads, [&](std::size_t i) {
    out.row(static_cast<Eigen::Index>(i)) = score(params, data.row(static_cast<int>(i)), method, options.model).transpose();
  });
  return out;
}

}  // namespace maxstab
