#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "maxstab/core.hpp"

namespace maxstab {

/// Monte Carlo check of the MLE limit law at a fixed truth.
struct StudyConfig {
  ParamVector theta0;
  int n = 200;
  int replications = 400;
  std::uint64_t master_seed = 1;
  double ci_level = 0.95;
  int fisher_draws = 100000;

  explicit StudyConfig(ParamVector truth) : theta0(std::move(truth)) {}
};

/// Throws InvalidArgument unless n >= 10, R >= 10, ci_level in (0, 1) and
/// fisher_draws >= 2; UnsupportedModel for families that cannot be fitted.
void validate(const StudyConfig& cfg);

/// {"params": {...}, "n": 200, "replications": 400, "seed": 7,
///  "ci_level": 0.95, "fisher_draws": 100000}; all keys but params optional.
StudyConfig study_config_from_json(const nlohmann::json& j);
nlohmann::json to_json(const StudyConfig& cfg);

/// Offset added to every unconstrained coordinate of the truth to start each fit.
inline constexpr double kStudyStartOffset = 0.15;
/// Largest tolerated share of non-converged replications.
inline constexpr double kMaxFailureShare = 0.2;
/// XORed into the master seed for the reference information draws.
inline constexpr std::uint64_t kFisherSeedMask = 0x4649534845520000ULL;

struct Replication {
  int index = 0;
  bool converged = false;
  /// Every Wald interval of the fit contains the true natural parameter.
  bool covered = false;
  /// 1 where the interval for that natural coordinate contains the truth.
  Eigen::VectorXi covered_by_coordinate;
  Eigen::VectorXd estimate;       // natural scale
  Eigen::VectorXd unconstrained;  // u_hat
  std::string error;
};

struct StudySummary {
  int n_converged = 0;
  int n_failed = 0;
  /// Mean and covariance of sqrt(n) (u_hat - u0) over converged replications.
  Eigen::VectorXd mean;
  Eigen::MatrixXd covariance;
  Eigen::VectorXd sd;
  /// sqrt(diag(I^-1)) on the unconstrained scale.
  Eigen::VectorXd limit_sd;
  /// Monte Carlo standard error of limit_sd, propagated linearly from the
  /// entrywise standard errors of I.
  Eigen::VectorXd limit_sd_se;
  /// Per-coordinate Kolmogorov distance to N(0, [I^-1]_uu).
  Eigen::VectorXd kolmogorov;
  double coverage = 0.0;
  /// 95% Clopper-Pearson interval for the coverage.
  double coverage_lower = 0.0;
  double coverage_upper = 0.0;
  Eigen::VectorXd coverage_by_coordinate;
  /// Natural-scale limit covariance J I^-1 J' with J = d natural / d u at u0.
  Eigen::MatrixXd natural_limit_covariance;
};

struct StudyResult {
  StudyConfig config;
  Eigen::VectorXd u0;
  Eigen::VectorXd natural0;
  std::vector<std::string> names;
  Eigen::MatrixXd reference_info;
  Eigen::MatrixXd reference_info_se;
  Eigen::MatrixXd reference_inverse;
  Eigen::MatrixXd jacobian;
  std::vector<Replication> replications;
  StudySummary summary;

  explicit StudyResult(StudyConfig cfg) : config(std::move(cfg)) {}
};

/// Replication r fits n rows drawn in sequence from RngStream(master_seed, r),
/// starting from u0 + kStudyStartOffset with one start. Results do not depend
/// on `threads`. Throws TooManyFailures when more than kMaxFailureShare of the
/// replications do not converge.
StudyResult run_study(const StudyConfig& cfg, int threads = 1);

/// Summary statistics of the converged replications.
StudySummary summarize_replications(const StudyResult& partial);

/// Clopper-Pearson interval for `successes` out of `trials` at `level`.
std::pair<double, double> clopper_pearson(int successes, int trials, double level);

/// sup_x |F_n(x) - Phi(x / sd)|.
double kolmogorov_distance(std::vector<double> sample, double sd);

enum class ReportFormat { json, csv };

/// JSON report, or per-replication CSV with header rep,converged,covered,theta_1,...
/// holding natural-scale estimates.
std::string summarize(const StudyResult& result, ReportFormat format);
nlohmann::json to_json(const StudyResult& result);

}  // namespace maxstab
