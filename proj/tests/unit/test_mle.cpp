#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <vector>

#include "maxstab/error.hpp"
#include "maxstab/linalg.hpp"
#include "maxstab/mle.hpp"
#include "maxstab/simulate.hpp"

using namespace maxstab;

namespace {

ParamVector hr2(double l2) {
  Eigen::MatrixXd m(2, 2);
  m << 0, l2, l2, 0;
  return ParamVector::huesler_reiss(m);
}

Dataset logistic_data(double theta, int n, std::uint64_t seed) {
  return simulate(*make_model(ParamVector::logistic(2, theta)), n, seed);
}

FitResult scalar_fit(double u_hat, double info, int n) {
  FitResult r(ParamVector::logistic(2, 0.5));
  r.chart = model_parameterization(ModelId::logistic, 2);
  r.u_hat = Eigen::VectorXd::Constant(1, u_hat);
  r.natural_hat = r.chart.natural(r.u_hat);
  r.n = n;
  r.observed_info = Eigen::MatrixXd::Constant(1, 1, info);
  r.opg_info = r.observed_info;
  return r;
}

}  // namespace

TEST_CASE("logistic fit recovers the truth") {
  const Dataset data = logistic_data(0.6, 1000, 101);
  const FitResult r = fit(data, default_init(ModelId::logistic, 2));
  CHECK(r.converged);
  CHECK(r.theta_hat.theta() > 0.55);
  CHECK(r.theta_hat.theta() < 0.65);
  REQUIRE(r.wald_intervals.size() == 1);
  CHECK(r.wald_intervals[0].lower < 0.6);
  CHECK(r.wald_intervals[0].upper > 0.6);
  CHECK(r.wald_intervals[0].name == "theta");
  CHECK(r.gradient_norm < 1e-5);
  CHECK(r.starts.size() == 3);
  CHECK_FALSE(r.starts_disagree);
  CHECK(min_eigenvalue(r.observed_info) > 0.0);
  CHECK(r.observed_info == r.observed_info.transpose());
  CHECK(r.opg_info == r.opg_info.transpose());
  CHECK(r.loglik == doctest::Approx(log_likelihood(r.theta_hat, data)).epsilon(1e-14));
}

TEST_CASE("fit started at the truth is stationary") {
  const Dataset data = logistic_data(0.6, 500, 102);
  FitOptions opts;
  opts.starts = 1;
  const FitResult r = fit(data, ParamVector::logistic(2, 0.6), opts);
  CHECK(r.converged);
  CHECK(r.gradient_norm < 1e-5);
}

TEST_CASE("empty data is rejected") {
  CHECK_THROWS_AS(Dataset(Dataset::Matrix(0, 2)), Error);
  try {
    Dataset(Dataset::Matrix(0, 2));
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::EmptyData);
  }
}

TEST_CASE("fit is invariant to row order") {
  const Dataset data = logistic_data(0.4, 300, 103);
  std::vector<int> perm(300);
  std::iota(perm.begin(), perm.end(), 0);
  std::mt19937_64 gen(4);
  std::shuffle(perm.begin(), perm.end(), gen);
  Dataset::Matrix rows(300, 2);
  for (int i = 0; i < 300; ++i) rows.row(i) = data.matrix().row(perm[static_cast<std::size_t>(i)]);
  const FitResult a = fit(data, default_init(ModelId::logistic, 2));
  const FitResult b = fit(Dataset(rows), default_init(ModelId::logistic, 2));
  CHECK(a.theta_hat.theta() == b.theta_hat.theta());
  CHECK(a.loglik == b.loglik);
}

TEST_CASE("random starts agree on the logistic likelihood") {
  const Dataset data = logistic_data(0.6, 400, 104);
  FitOptions opts;
  opts.starts = 5;
  opts.start_spread = 1.5;
  const FitResult r = fit(data, default_init(ModelId::logistic, 2), opts);
  double lo = INFINITY, hi = -INFINITY;
  for (const auto& s : r.starts) {
    CHECK(s.converged);
    lo = std::min(lo, s.loglik);
    hi = std::max(hi, s.loglik);
  }
  CHECK(hi - lo < 1e-6);
}

TEST_CASE("Huesler-Reiss and Dirichlet fits") {
  const Dataset hr = simulate(*make_model(hr2(1.0)), 600, 105);
  const FitResult r = fit(hr, default_init(ModelId::huesler_reiss, 2));
  CHECK(r.converged);
  CHECK(r.wald_intervals[0].lower < 1.0);
  CHECK(r.wald_intervals[0].upper > 1.0);

  const Dataset di = simulate(*make_model(ParamVector::dirichlet(Eigen::Vector2d(2.0, 1.0))), 200, 106);
  FitOptions opts;
  opts.starts = 1;
  const FitResult d = fit(di, default_init(ModelId::dirichlet, 2), opts);
  CHECK(d.converged);
  REQUIRE(d.wald_intervals.size() == 2);
  CHECK(d.wald_intervals[0].name == "alpha_1");
  for (const auto& w : d.wald_intervals) {
    CHECK(w.lower > 0.0);
    CHECK(w.lower < w.estimate);
    CHECK(w.estimate < w.upper);
  }
}

TEST_CASE("trivariate Huesler-Reiss uses delta-method intervals") {
  Eigen::MatrixXd l2(3, 3);
  l2 << 0, 0.25, 0.75, 0.25, 0, 0.5, 0.75, 0.5, 0;
  const Dataset data = simulate(*make_model(ParamVector::huesler_reiss(l2)), 300, 107);
  FitOptions opts;
  opts.starts = 1;
  const FitResult r = fit(data, default_init(ModelId::huesler_reiss, 3), opts);
  CHECK(r.converged);
  CHECK_FALSE(r.chart.coordinatewise);
  REQUIRE(r.wald_intervals.size() == 3);
  for (const auto& w : r.wald_intervals) CHECK(w.lower < w.upper);
}

TEST_CASE("extremal-t cannot be fitted") {
  CHECK_THROWS_AS(model_parameterization(ModelId::extremal_t, 2), Error);
}

TEST_CASE("Wald interval arithmetic") {
  // SE = sqrt(1 / (I n)) = 0.1
  const auto [lo, hi] = unconstrained_interval(0.0, 0.1, 0.95);
  CHECK(lo == doctest::Approx(-0.196).epsilon(1e-3));
  CHECK(hi == doctest::Approx(0.196).epsilon(1e-3));

  const FitResult f = scalar_fit(0.0, 1.0, 100);
  const auto w50 = wald_interval(f, 0.5);
  const auto w90 = wald_interval(f, 0.9);
  const auto w99 = wald_interval(f, 0.99);
  CHECK(w90[0].lower < w50[0].lower);
  CHECK(w99[0].lower < w90[0].lower);
  CHECK(w50[0].upper < w90[0].upper);
  CHECK(w90[0].upper < w99[0].upper);

  const FitResult wide = scalar_fit(3.0, 1e-6, 1);
  const auto w = wald_interval(wide, 0.95);
  CHECK(w[0].lower > 0.0);
  CHECK(w[0].upper < 1.0);

  CHECK_THROWS_AS(wald_interval(scalar_fit(0.0, 0.0, 10), 0.95), Error);
  CHECK_THROWS_AS(unconstrained_interval(0.0, 1.0, 1.0), Error);
}

TEST_CASE("Fisher information") {
  const ParamVector p = ParamVector::logistic(2, 0.6);
  const FisherResult opg = fisher_information(p, FisherMethod::opg_monte_carlo, 20000, 1, nullptr);
  CHECK(opg.info(0, 0) > 0.0);
  const Dataset data = logistic_data(0.6, 5000, 2);
  const FisherResult obs = fisher_information(p, FisherMethod::observed, 0, 0, &data);
  const double combined = std::hypot(opg.standard_errors(0, 0), obs.standard_errors(0, 0));
  CHECK(std::abs(opg.info(0, 0) - obs.info(0, 0)) < 3.0 * combined);

  const FisherResult analytic = fisher_opg(p, 20000, 1, 1, ScoreMethod::analytic);
  CHECK(analytic.info(0, 0) == doctest::Approx(opg.info(0, 0)).epsilon(1e-5));

  const FisherResult hr = fisher_information(hr2(1.0), FisherMethod::opg_monte_carlo, 5000, 3, nullptr);
  CHECK(hr.info.rows() == 1);
  CHECK(hr.info(0, 0) > 0.0);

  CHECK_THROWS_AS(fisher_information(p, FisherMethod::observed, 0, 0, nullptr), Error);
}

TEST_CASE("information degenerates at the independence boundary") {
  try {
    fisher_information(ParamVector::logistic(2, 1.0 - 2e-8), FisherMethod::opg_monte_carlo, 2000, 4, nullptr);
    FAIL("expected Singular");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::Singular);
  }
}

TEST_CASE("Brown-Resnick chart") {
  Eigen::MatrixXd loc(3, 1);
  loc << 0, 1, 3;
  const Parameterization chart = brown_resnick_parameterization(loc);
  const Eigen::VectorXd u = brown_resnick_unconstrained(1.0, 1.0);
  const ParamVector p = chart.to_params(u);
  CHECK(p.lambda2()(0, 1) == doctest::Approx(0.25).epsilon(1e-15));
  CHECK(p.lambda2()(0, 2) == doctest::Approx(0.75).epsilon(1e-15));
  CHECK(p.lambda2()(1, 2) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(chart.natural(u)(0) == doctest::Approx(1.0));
  CHECK(chart.natural(u)(1) == doctest::Approx(1.0));
  CHECK_THROWS_AS(brown_resnick_unconstrained(1.0, 2.0), Error);
}
