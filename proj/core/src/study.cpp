#include "maxstab/study.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <boost/math/distributions/normal.hpp>
#include <boost/math/special_functions/beta.hpp>

#include "maxstab/error.hpp"
#include "maxstab/finite_diff.hpp"
#include "maxstab/io.hpp"
#include "maxstab/mle.hpp"
#include "maxstab/parallel.hpp"
#include "maxstab/simulate.hpp"

namespace maxstab {

namespace {

Dataset replication_data(const Model& model, int n, std::uint64_t seed, int r) {
  RngStream rng(seed, static_cast<std::uint64_t>(r));
  std::vector<Observation> rows;
  rows.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) rows.push_back(simulate_one(model, rng));
  return Dataset::from_rows(rows);
}

Replication run_replication(const StudyConfig& cfg, const Model& model, const Parameterization& chart,
                            const Eigen::VectorXd& u0, const Eigen::VectorXd& natural0, int r) {
  Replication rep;
  rep.index = r;
  const Eigen::VectorXd nan = Eigen::VectorXd::Constant(natural0.size(), NAN);
  rep.estimate = nan;
  rep.unconstrained = Eigen::VectorXd::Constant(u0.size(), NAN);
  rep.covered_by_coordinate = Eigen::VectorXi::Zero(natural0.size());
  try {
    const Dataset data = replication_data(model, cfg.n, cfg.master_seed, r);
    FitOptions options;
    options.starts = 1;
    options.level = cfg.ci_level;
    const Eigen::VectorXd init = u0.array() + kStudyStartOffset;
    const FitResult f = fit(chart, data, init, options);
    rep.converged = f.converged;
    rep.estimate = f.natural_hat;
    rep.unconstrained = f.u_hat;
    if (f.info_singular) {
      rep.error = "singular observed information";
    } else {
      rep.covered = true;
      for (std::size_t i = 0; i < f.wald_intervals.size(); ++i) {
        const auto& w = f.wald_intervals[i];
        const double truth = natural0(static_cast<Eigen::Index>(i));
        const bool hit = w.lower <= truth && truth <= w.upper;
        rep.covered_by_coordinate(static_cast<Eigen::Index>(i)) = hit ? 1 : 0;
        rep.covered = rep.covered && hit;
      }
    }
  } catch (const Error& e) {
    rep.converged = false;
    rep.error = std::string(to_string(e.code())) + ": " + e.what();
  }
  if (!rep.converged) {
    rep.covered = false;
    rep.covered_by_coordinate.setZero();
  }
  return rep;
}

}  // namespace

void validate(const StudyConfig& cfg) {
  require(cfg.n >= 10, ErrorCode::InvalidArgument, "study needs n >= 10");
  require(cfg.replications >= 10, ErrorCode::InvalidArgument, "study needs at least 10 replications");
  require(cfg.ci_level > 0.0 && cfg.ci_level < 1.0, ErrorCode::InvalidArgument, "ci_level must lie in (0, 1)");
  require(cfg.fisher_draws >= 2, ErrorCode::InvalidArgument, "fisher_draws must be at least 2");
  model_parameterization(cfg.theta0.model(), cfg.theta0.dim());
}

StudyConfig study_config_from_json(const nlohmann::json& j) {
  require(j.is_object(), ErrorCode::ParseError, "study config must be a JSON object");
  require(j.contains("params"), ErrorCode::ParseError, "study config lacks \"params\"");
  std::optional<ModelId> model;
  if (j.contains("model")) model = parse_model_id(j["model"].get<std::string>());
  StudyConfig cfg(params_from_json(j["params"], model));
  try {
    cfg.n = j.value("n", cfg.n);
    cfg.replications = j.value("replications", cfg.replications);
    cfg.master_seed = j.value("seed", cfg.master_seed);
    cfg.ci_level = j.value("ci_level", cfg.ci_level);
    cfg.fisher_draws = j.value("fisher_draws", cfg.fisher_draws);
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::ParseError, std::string("malformed study config: ") + e.what());
  }
  validate(cfg);
  return cfg;
}

nlohmann::json to_json(const StudyConfig& cfg) {
  nlohmann::json j;
  j["model"] = std::string(to_string(cfg.theta0.model()));
  j["params"] = params_to_json(cfg.theta0);
  j["n"] = cfg.n;
  j["replications"] = cfg.replications;
  j["seed"] = cfg.master_seed;
  j["ci_level"] = cfg.ci_level;
  j["fisher_draws"] = cfg.fisher_draws;
  return j;
}

std::pair<double, double> clopper_pearson(int successes, int trials, double level) {
  require(trials > 0 && successes >= 0 && successes <= trials, ErrorCode::InvalidArgument,
          "need 0 <= successes <= trials and trials > 0");
  require(level > 0.0 && level < 1.0, ErrorCode::InvalidArgument, "level must lie in (0, 1)");
  const double tail = 0.5 * (1.0 - level);
  const double x = successes, n = trials;
  const double lo = successes == 0 ? 0.0 : boost::math::ibeta_inv(x, n - x + 1.0, tail);
  const double hi = successes == trials ? 1.0 : boost::math::ibeta_inv(x + 1.0, n - x, 1.0 - tail);
  return {lo, hi};
}

double kolmogorov_distance(std::vector<double> sample, double sd) {
  require(!sample.empty(), ErrorCode::EmptyData, "empty sample");
  require(sd > 0.0, ErrorCode::InvalidArgument, "sd must be positive");
  std::sort(sample.begin(), sample.end());
  const boost::math::normal_distribution<double> limit(0.0, sd);
  const double n = static_cast<double>(sample.size());
  double worst = 0.0;
  for (std::size_t i = 0; i < sample.size(); ++i) {
    const double f = boost::math::cdf(limit, sample[i]);
    worst = std::max({worst, (static_cast<double>(i) + 1.0) / n - f, f - static_cast<double>(i) / n});
  }
  return worst;
}

StudySummary summarize_replications(const StudyResult& partial) {
  StudySummary s;
  const auto d = partial.u0.size();
  const double root_n = std::sqrt(static_cast<double>(partial.config.n));
  std::vector<Eigen::VectorXd> x;
  int covered = 0;
  s.coverage_by_coordinate = Eigen::VectorXd::Zero(partial.natural0.size());
  for (const auto& rep : partial.replications) {
    if (!rep.converged) {
      ++s.n_failed;
      continue;
    }
    ++s.n_converged;
    x.push_back(root_n * (rep.unconstrained - partial.u0));
    covered += rep.covered ? 1 : 0;
    s.coverage_by_coordinate += rep.covered_by_coordinate.cast<double>();
  }
  s.coverage_by_coordinate /= static_cast<double>(s.n_converged);
  const double m = s.n_converged;
  s.mean = Eigen::VectorXd::Zero(d);
  for (const auto& v : x) s.mean += v;
  s.mean /= m;
  s.covariance = Eigen::MatrixXd::Zero(d, d);
  for (const auto& v : x) s.covariance += (v - s.mean) * (v - s.mean).transpose();
  s.covariance /= m - 1.0;
  s.sd = s.covariance.diagonal().cwiseSqrt();

  const Eigen::MatrixXd& inv = partial.reference_inverse;
  s.limit_sd = inv.diagonal().cwiseSqrt();
  s.limit_sd_se = Eigen::VectorXd::Zero(d);
  for (Eigen::Index i = 0; i < d; ++i) {
    double var = 0.0;
    for (Eigen::Index a = 0; a < d; ++a)
      for (Eigen::Index b = 0; b < d; ++b) {
        const double g = inv(i, a) * inv(b, i) * partial.reference_info_se(a, b);
        var += g * g;
      }
    s.limit_sd_se(i) = std::sqrt(var) / (2.0 * s.limit_sd(i));
  }

  s.kolmogorov = Eigen::VectorXd::Zero(d);
  for (Eigen::Index i = 0; i < d; ++i) {
    std::vector<double> col;
    for (const auto& v : x) col.push_back(v(i));
    s.kolmogorov(i) = kolmogorov_distance(col, s.limit_sd(i));
  }

  s.coverage = covered / m;
  std::tie(s.coverage_lower, s.coverage_upper) = clopper_pearson(covered, s.n_converged, 0.95);
  s.natural_limit_covariance = partial.jacobian * inv * partial.jacobian.transpose();
  return s;
}

StudyResult run_study(const StudyConfig& cfg, int threads) {
  validate(cfg);
  StudyResult result(cfg);
  const ParamVector& theta0 = cfg.theta0;
  const Parameterization chart = model_parameterization(theta0.model(), theta0.dim());
  result.u0 = to_unconstrained(theta0);
  result.natural0 = chart.natural(result.u0);
  result.names = chart.names;

  const FisherResult ref = fisher_information(theta0, FisherMethod::opg_monte_carlo, cfg.fisher_draws,
                                              cfg.master_seed ^ kFisherSeedMask, nullptr, threads);
  result.reference_info = ref.info;
  result.reference_info_se = ref.standard_errors;
  result.reference_inverse = ref.info.inverse();
  result.jacobian = finite_diff_jacobian(chart.natural, result.u0);

  const auto model = make_model(theta0);
  result.replications.resize(static_cast<std::size_t>(cfg.replications));
  parallel_for(result.replications.size(), threads, [&](std::size_t r) {
    result.replications[r] = run_replication(cfg, *model, chart, result.u0, result.natural0, static_cast<int>(r));
  });

  int failed = 0;
  for (const auto& rep : result.replications) failed += rep.converged ? 0 : 1;
  if (failed > kMaxFailureShare * cfg.replications) {
    fail(ErrorCode::TooManyFailures, std::to_string(failed) + " of " + std::to_string(cfg.replications) +
                                         " replications did not converge");
  }
  result.summary = summarize_replications(result);
  return result;
}

nlohmann::json to_json(const StudyResult& result) {
  const StudySummary& s = result.summary;
  nlohmann::json j;
  j["config"] = to_json(result.config);
  j["names"] = result.names;
  j["truth"] = {{"natural", json_vector(result.natural0)}, {"unconstrained", json_vector(result.u0)}};
  j["reference"] = {{"info", json_matrix(result.reference_info)},
                    {"info_se", json_matrix(result.reference_info_se)},
                    {"inverse", json_matrix(result.reference_inverse)},
                    {"jacobian", json_matrix(result.jacobian)}};
  j["summary"] = {{"n_converged", s.n_converged},
                  {"n_failed", s.n_failed},
                  {"mean", json_vector(s.mean)},
                  {"covariance", json_matrix(s.covariance)},
                  {"sd", json_vector(s.sd)},
                  {"limit_sd", json_vector(s.limit_sd)},
                  {"limit_sd_se", json_vector(s.limit_sd_se)},
                  {"kolmogorov", json_vector(s.kolmogorov)},
                  {"coverage", s.coverage},
                  {"coverage_interval", {s.coverage_lower, s.coverage_upper}},
                  {"coverage_by_coordinate", json_vector(s.coverage_by_coordinate)},
                  {"natural_limit_covariance", json_matrix(s.natural_limit_covariance)}};
  nlohmann::json reps = nlohmann::json::array();
  for (const auto& r : result.replications) {
    nlohmann::json e = {{"rep", r.index},
                        {"converged", r.converged},
                        {"covered", r.covered},
                        {"estimate", json_vector(r.estimate)},
                        {"unconstrained", json_vector(r.unconstrained)}};
    if (!r.error.empty()) e["error"] = r.error;
    reps.push_back(std::move(e));
  }
  j["replications"] = std::move(reps);
  return j;
}

std::string summarize(const StudyResult& result, ReportFormat format) {
  if (format == ReportFormat::json) return dump_json(to_json(result)) + "\n";
  std::ostringstream out;
  out << "rep,converged,covered";
  for (Eigen::Index i = 0; i < result.natural0.size(); ++i) out << ",theta_" << i + 1;
  out << '\n';
  for (const auto& r : result.replications) {
    out << r.index << ',' << (r.converged ? 1 : 0) << ',' << (r.covered ? 1 : 0);
    for (Eigen::Index i = 0; i < r.estimate.size(); ++i) out << ',' << format_double(r.estimate(i));
    out << '\n';
  }
  return out.str();
}

}  // namespace maxstab
