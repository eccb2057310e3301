#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "maxstab/core.hpp"
#include "maxstab/likelihood.hpp"
#include "maxstab/model.hpp"
#include "maxstab/optimize.hpp"
#include "maxstab/spatial.hpp"

namespace maxstab {

/// Smooth chart from R^D onto a parameter family.
struct Parameterization {
  int dim = 0;
  std::function<ParamVector(const Eigen::VectorXd&)> to_params;
  /// Natural-scale coordinates reported to users.
  std::function<Eigen::VectorXd(const Eigen::VectorXd&)> natural;
  std::vector<std::string> names;
  /// True when natural coordinate i is an increasing function of u_i alone, so
  /// interval endpoints map directly; otherwise the delta method is used.
  bool coordinatewise = true;
};

/// The chart given by from_unconstrained. Supports logistic, dirichlet (k <= 3)
/// and huesler_reiss; throws UnsupportedModel otherwise.
Parameterization model_parameterization(ModelId model, int dim);

/// Brown-Resnick fit through the Huesler-Reiss map on fixed locations;
/// u = (log scale, logit(alpha / 2)), natural = (scale, alpha).
Parameterization brown_resnick_parameterization(const Eigen::MatrixXd& locations);
Eigen::VectorXd brown_resnick_unconstrained(double scale, double alpha);

/// Starting values used when the caller supplies none.
ParamVector default_init(ModelId model, int dim);

enum class InfoSource { observed, opg };

struct FitOptions {
  int starts = 3;
  /// Extra starts are the first start plus N(0, spread^2) offsets per coordinate.
  double start_spread = 0.5;
  std::uint64_t start_seed = 0x666974ULL;
  int threads = 1;
  ModelOptions model;
  NelderMeadOptions nelder_mead;
  BfgsOptions bfgs;
  double level = 0.95;
  double hessian_step = 1e-4;
  InfoSource wald_info = InfoSource::observed;
  /// Raise MaxIterations instead of returning converged = false.
  bool require_convergence = false;
};

struct StartOutcome {
  Eigen::VectorXd init_u;
  Eigen::VectorXd u_hat;
  double loglik = 0.0;
  bool converged = false;
  int n_iter = 0;
  double gradient_norm = 0.0;
  /// Nonempty when the start failed with a library error.
  std::string error;
};

struct WaldInterval {
  std::string name;
  double estimate = 0.0;
  double lower = 0.0;
  double upper = 0.0;
};

struct FitResult {
  explicit FitResult(ParamVector theta) : theta_hat(std::move(theta)) {}

  ParamVector theta_hat;
  Parameterization chart;
  Eigen::VectorXd u_hat;
  Eigen::VectorXd natural_hat;
  double loglik = 0.0;
  bool converged = false;
  int n_iter = 0;
  /// Norm of the gradient of the mean log-likelihood at u_hat.
  double gradient_norm = 0.0;
  int n = 0;
  /// -Hessian of the mean log-likelihood in unconstrained coordinates.
  Eigen::MatrixXd observed_info;
  /// Mean outer product of the per-row scores.
  Eigen::MatrixXd opg_info;
  bool info_singular = false;
  double level = 0.95;
  std::vector<WaldInterval> wald_intervals;
  std::vector<StartOutcome> starts;
  /// Converged starts whose log-likelihoods differ by more than 1e-6.
  bool starts_disagree = false;
};

/// Maximizes the log-likelihood over the chart, Nelder-Mead then BFGS from
/// each start, and keeps the best converged local maximum.
/// Throws EmptyData, NoImprovement when every start fails, and MaxIterations
/// when options.require_convergence is set and no start converged.
FitResult fit(const Parameterization& chart, const Dataset& data, const Eigen::VectorXd& init_u,
              const FitOptions& options = {});
FitResult fit(const Dataset& data, const ParamVector& init, const FitOptions& options = {});

/// theta_hat_u +- z_{(1+level)/2} sqrt([I^-1]_uu / n), mapped to the natural
/// scale. Throws Singular when the chosen information is not positive definite.
std::vector<WaldInterval> wald_interval(const FitResult& fit, double level, InfoSource source = InfoSource::observed);

/// Interval for one coordinate given its unconstrained estimate and standard error.
std::pair<double, double> unconstrained_interval(double estimate, double standard_error, double level);

enum class FisherMethod { opg_monte_carlo, observed };

struct FisherResult {
  Eigen::MatrixXd info;
  /// Monte Carlo standard error of every entry.
  Eigen::MatrixXd standard_errors;
  int n = 0;
};

/// Smallest eigenvalue allowed for an information matrix.
inline constexpr double kSingularThreshold = 1e-10;

/// Mean score outer product over n_draws simulated observations at params.
FisherResult fisher_opg(const ParamVector& params, int n_draws, std::uint64_t seed, int threads = 1,
                        ScoreMethod method = ScoreMethod::finite_diff, const ModelOptions& options = {});

/// -Hessian of the mean log-likelihood at u by central differences with step h;
/// standard errors from the spread of the per-row Hessians.
FisherResult fisher_observed(const Parameterization& chart, const Eigen::VectorXd& u, const Dataset& data,
                             double h = 1e-4, int threads = 1, const ModelOptions& options = {});

/// Dispatches on method (n_draws and seed for opg, data for observed) and
/// throws Singular when the minimum eigenvalue is below kSingularThreshold.
FisherResult fisher_information(const ParamVector& params, FisherMethod method, int n_draws, std::uint64_t seed,
                                const Dataset* data = nullptr, int threads = 1, const ModelOptions& options = {});

/// Throws Singular unless the symmetric matrix has min eigenvalue >= kSingularThreshold.
void require_nonsingular(const Eigen::MatrixXd& info);

}  // namespace maxstab
