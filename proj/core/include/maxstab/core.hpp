#pragma once

#include <Eigen/Dense>

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "maxstab/error.hpp"

namespace maxstab {

enum class ModelId { logistic, dirichlet, huesler_reiss, extremal_t };

std::string_view to_string(ModelId model) noexcept;
ModelId parse_model_id(std::string_view name);

/// Smallest allowed distance of the logistic dependence parameter from 0 and 1.
inline constexpr double kLogisticBoundary = 1e-8;

/// Model-tagged parameter container. Instances are validated on construction
/// and immutable afterwards.
///
/// Payloads: logistic holds a scalar theta in (0,1); dirichlet a positive
/// k-vector alpha; huesler_reiss a symmetric k x k matrix of lambda^2 values
/// with zero diagonal that is strictly conditionally negative definite;
/// extremal_t a k x k correlation matrix Sigma plus degrees of freedom nu.
class ParamVector {
 public:
  static ParamVector logistic(int dim, double theta);
  static ParamVector dirichlet(Eigen::VectorXd alpha);
  static ParamVector huesler_reiss(Eigen::MatrixXd lambda2);
  static ParamVector extremal_t(Eigen::MatrixXd sigma, double nu);

  ModelId model() const noexcept { return model_; }
  int dim() const noexcept { return dim_; }

  double theta() const;
  const Eigen::VectorXd& alpha() const;
  const Eigen::MatrixXd& lambda2() const;
  const Eigen::MatrixXd& sigma() const;
  double nu() const;

  /// Parameters flattened on their natural scale: [theta], alpha, the upper
  /// triangle of Lambda row by row, or the upper triangle of Sigma then nu.
  Eigen::VectorXd natural() const;
  std::vector<std::string> natural_names() const;

  friend bool operator==(const ParamVector& a, const ParamVector& b);

 private:
  ParamVector() = default;

  ModelId model_ = ModelId::logistic;
  int dim_ = 0;
  double scalar_ = 0.0;       // theta or nu
  Eigen::VectorXd vector_;    // alpha
  Eigen::MatrixXd matrix_;    // lambda^2 or Sigma
};

/// Untrusted parameter payload as read from a file or assembled by a caller.
struct RawParams {
  ModelId model = ModelId::logistic;
  int dim = 0;
  std::optional<double> theta;
  std::optional<Eigen::VectorXd> alpha;
  std::optional<Eigen::MatrixXd> matrix;
  std::optional<double> nu;
};

ParamVector validate_params(const RawParams& raw);

/// Number of free parameters of the family in dimension k.
int param_count(ModelId model, int dim);

/// Bijection between the open parameter set and R^D.
///   logistic:      rescaled logit of theta on (1e-8, 1 - 1e-8)
///   dirichlet:     log alpha_i
///   huesler_reiss: log-Cholesky factor of R^(1)/4 (diagonal entries stored as
///                  log L_jj^2); for k = 2 this is log lambda^2_12
///   extremal_t:    canonical partial correlations through atanh, then log nu
Eigen::VectorXd to_unconstrained(const ParamVector& p);
ParamVector from_unconstrained(ModelId model, int dim, const Eigen::VectorXd& v);

/// d theta / d v of the logistic transform, expressed through theta.
double logistic_theta_slope(double theta);

/// One observation on the unit-Frechet scale.
using Observation = Eigen::VectorXd;

/// n observations of a common dimension k; rows are strictly positive and finite.
class Dataset {
 public:
  using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

  explicit Dataset(Matrix rows);
  static Dataset from_rows(const std::vector<Observation>& rows);

  int size() const noexcept { return static_cast<int>(rows_.rows()); }
  int dim() const noexcept { return static_cast<int>(rows_.cols()); }
  std::span<const double> row(int i) const {
    return {rows_.data() + static_cast<std::ptrdiff_t>(i) * rows_.cols(),
            static_cast<std::size_t>(rows_.cols())};
  }
  const Matrix& matrix() const noexcept { return rows_; }

 private:
  Matrix rows_;
};

/// Throws unless every component is finite and strictly positive.
void validate_observation(std::span<const double> z);

}  // namespace maxstab
