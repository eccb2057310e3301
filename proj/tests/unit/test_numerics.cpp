#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "maxstab/error.hpp"
#include "maxstab/finite_diff.hpp"
#include "maxstab/mvn.hpp"
#include "maxstab/quadrature.hpp"
#include "maxstab/rng.hpp"
#include "maxstab/special.hpp"
#include "maxstab/stable.hpp"

using namespace maxstab;

namespace {

// P(X <= h, Y <= k) by an independent tensor Gauss-Legendre rule on the
// bivariate normal density, truncated at -12.
double bvn_tensor(double h, double k, double r) {
  using Rule = boost::math::quadrature::gauss<double, 40>;
  const double norm = 1.0 / (2.0 * std::numbers::pi * std::sqrt(1.0 - r * r));
  auto inner = [&](double x) {
    auto f = [&](double y) { return norm * std::exp(-(x * x - 2.0 * r * x * y + y * y) / (2.0 * (1.0 - r * r))); };
    double acc = 0.0;
    for (int s = 0; s < 24; ++s) {
      const double a = -12.0 + (k + 12.0) * s / 24.0, b = -12.0 + (k + 12.0) * (s + 1) / 24.0;
      acc += Rule::integrate(f, a, b);
    }
    return acc;
  };
  double acc = 0.0;
  for (int s = 0; s < 24; ++s) {
    const double a = -12.0 + (h + 12.0) * s / 24.0, b = -12.0 + (h + 12.0) * (s + 1) / 24.0;
    acc += Rule::integrate(inner, a, b);
  }
  return acc;
}

double kolmogorov_two_sample(std::vector<double> a, std::vector<double> b) {
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  std::size_t i = 0, j = 0;
  double worst = 0.0;
  while (i < a.size() && j < b.size()) {
    const double x = std::min(a[i], b[j]);
    while (i < a.size() && a[i] <= x) ++i;
    while (j < b.size() && b[j] <= x) ++j;
    worst = std::max(worst, std::abs(static_cast<double>(i) / a.size() - static_cast<double>(j) / b.size()));
  }
  return worst;
}

}  // namespace

TEST_CASE("rng streams") {
  RngStream a(123, 4), b(123, 4), c(123, 5);
  bool differs = false;
  for (int i = 0; i < 1000; ++i) {
    const auto x = a();
    CHECK(x == b());
    differs = differs || x != c();
  }
  CHECK(differs);
  RngStream u(1, 0);
  double mean = 0.0, g = 0.0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    const double x = u.uniform();
    CHECK(x > 0.0);
    CHECK(x < 1.0);
    mean += x;
    g += u.gamma(0.4);
  }
  CHECK(std::abs(mean / n - 0.5) < 4.0 * std::sqrt(1.0 / 12.0 / n));
  CHECK(std::abs(g / n - 0.4) < 4.0 * std::sqrt(0.4 / n));
}

TEST_CASE("normal cdf examples") {
  const double zero[1] = {0.0};
  Eigen::MatrixXd one = Eigen::MatrixXd::Identity(1, 1);
  CHECK(mvn_cdf(zero, one).value == doctest::Approx(0.5).epsilon(1e-15));
  const double origin[2] = {0.0, 0.0};
  CHECK(mvn_cdf(origin, Eigen::MatrixXd::Identity(2, 2)).value == doctest::Approx(0.25).epsilon(1e-12));
  Eigen::MatrixXd c(2, 2);
  c << 1, 0.5, 0.5, 1;
  const double oracle = bvn_tensor(0.0, 0.0, 0.5);
  CHECK(oracle == doctest::Approx(1.0 / 3.0).epsilon(1e-9));
  CHECK(std::abs(mvn_cdf(origin, c).value - 1.0 / 3.0) < 5e-4);
  CHECK(std::abs(mvn_cdf(origin, c).value - oracle) < 1e-12);
}

TEST_CASE("bivariate normal against tensor quadrature on every branch") {
  for (double r : {-0.97, -0.8, -0.5, -0.1, 0.0, 0.2, 0.6, 0.9, 0.95, 0.99}) {
    for (auto [h, k] : {std::pair{0.3, -0.7}, {-1.5, 1.1}, {2.0, 2.5}, {-2.2, -0.4}}) {
      CHECK(bivariate_normal_cdf(h, k, r) == doctest::Approx(bvn_tensor(h, k, r)).epsilon(1e-10));
    }
  }
}

TEST_CASE("trivariate orthant probabilities") {
  // P(X <= 0) = 1/8 + (asin r12 + asin r13 + asin r23) / (4 pi)
  for (auto [a, b, c] : {std::tuple{0.5, 0.5, 0.5}, {0.2, -0.3, 0.4}, {0.9, 0.8, 0.75}}) {
    Eigen::MatrixXd cov(3, 3);
    cov << 1, a, b, a, 1, c, b, c, 1;
    const double zero[3] = {0, 0, 0};
    const CdfResult res = mvn_cdf(zero, cov, 1e-7);
    const double exact = 0.125 + (std::asin(a) + std::asin(b) + std::asin(c)) / (4.0 * std::numbers::pi);
    CHECK(res.converged);
    CHECK(std::abs(res.value - exact) < 1e-6);
    CHECK(res.error_estimate <= 1e-7);
  }
}

TEST_CASE("normal cdf limits and monotonicity") {
  std::mt19937_64 gen(3);
  std::normal_distribution<double> n01;
  const double inf = std::numeric_limits<double>::infinity();
  for (int rep = 0; rep < 20; ++rep) {
    const int p = 2 + rep % 3;
    Eigen::MatrixXd a(p, p);
    for (auto& x : a.reshaped()) x = n01(gen);
    const Eigen::MatrixXd cov = a * a.transpose() + 0.3 * Eigen::MatrixXd::Identity(p, p);
    std::vector<double> up(static_cast<std::size_t>(p));
    for (auto& x : up) x = n01(gen);
    double prev = mvn_cdf(up, cov, 1e-6).value;
    for (int i = 0; i < p; ++i) {
      up[static_cast<std::size_t>(i)] += 0.5;
      const double next = mvn_cdf(up, cov, 1e-6).value;
      CHECK(next >= prev - 3e-6);
      prev = next;
    }
    std::vector<double> big(static_cast<std::size_t>(p), inf);
    CHECK(mvn_cdf(big, cov).value == 1.0);
    big[0] = -inf;
    CHECK(mvn_cdf(big, cov).value == 0.0);
    std::vector<double> far(static_cast<std::size_t>(p), 40.0);
    CHECK(mvn_cdf(far, cov, 1e-8).value == doctest::Approx(1.0).epsilon(1e-12));
  }
  Eigen::MatrixXd nearly(3, 3);
  nearly << 1, 1, 0, 1, 1, 0, 0, 0, 1;
  const double zero[3] = {0, 0, 0};
  CHECK_THROWS_AS(mvn_cdf(zero, Eigen::MatrixXd::Zero(3, 3)), Error);
  CHECK_THROWS_AS(mvn_cdf(std::vector<double>(11, 0.0), Eigen::MatrixXd::Identity(11, 11)), Error);
}

TEST_CASE("mvn_log_pdf") {
  Eigen::MatrixXd c(2, 2);
  c << 2, 0.3, 0.3, 1;
  const double x[2] = {0.4, -0.2};
  const Eigen::Vector2d v(0.4, -0.2);
  const double expect = -0.5 * v.dot(c.inverse() * v) - 0.5 * std::log(c.determinant()) - std::log(2 * std::numbers::pi);
  CHECK(mvn_log_pdf(x, c) == doctest::Approx(expect).epsilon(1e-13));
}

TEST_CASE("integrate_box examples") {
  const double lo2[2] = {0, 0}, hi2[2] = {1, 1};
  CHECK(integrate_box([](std::span<const double>) { return 1.0; }, lo2, hi2, 1e-10) == doctest::Approx(1.0));
  const double lo1[1] = {0}, hi1[1] = {1};
  CHECK(integrate_box([](std::span<const double> x) { return x[0]; }, lo1, hi1, 1e-10) == doctest::Approx(0.5));
  const double a[1] = {-3}, b[1] = {3};
  const double mass = integrate_box([](std::span<const double> x) { return normal_pdf(x[0]); }, a, b, 1e-10);
  CHECK(std::abs(mass - std::erf(3.0 / std::numbers::sqrt2)) < 1e-9);
  CHECK(std::abs(mass - 0.9973002) < 1e-6);

  // product integrand in 3-D against the product of 1-D integrals
  const double lo3[3] = {0, -1, 0.5}, hi3[3] = {1, 2, 3};
  auto f3 = [](std::span<const double> x) { return std::exp(-x[0]) * std::cos(x[1]) * std::sqrt(x[2]); };
  const double exact = (1 - std::exp(-1.0)) * (std::sin(2.0) + std::sin(1.0)) * (2.0 / 3.0) *
                       (std::pow(3.0, 1.5) - std::pow(0.5, 1.5));
  QuadratureOptions opts;
  opts.rel_tol = 1e-10;
  CHECK(integrate_box(f3, lo3, hi3, opts).value == doctest::Approx(exact).epsilon(1e-9));

  // orthant helper: int_0^inf int_0^2 exp(-u - v) du dv
  const double up[2] = {std::numeric_limits<double>::infinity(), 2.0};
  const double val = integrate_orthant([](std::span<const double> u) { return std::exp(-u[0] - u[1]); }, up).value;
  CHECK(val == doctest::Approx(1.0 - std::exp(-2.0)).epsilon(1e-8));

  CHECK_THROWS_AS(integrate_box([](std::span<const double>) { return NAN; }, lo1, hi1, 1e-8), Error);
  const double lo4[4] = {}, hi4[4] = {1, 1, 1, 1};
  CHECK_THROWS_AS(integrate_box([](std::span<const double>) { return 1.0; }, lo4, hi4, 1e-8), Error);
  QuadratureOptions tight;
  tight.max_subdivisions = 3;
  tight.rel_tol = 1e-14;
  tight.abs_tol = 0.0;
  CHECK_THROWS_AS(integrate_box([](std::span<const double> x) { return 1.0 / std::sqrt(x[0] + 1e-12); }, lo2, hi2, tight),
                  Error);
}

TEST_CASE("positive stable sampler") {
  RngStream rng(11, 0);
  CHECK(sample_positive_stable(1.0, rng) == 1.0);
  CHECK_THROWS_AS(sample_positive_stable(0.0, rng), Error);
  CHECK_THROWS_AS(sample_positive_stable(1.5, rng), Error);

  // alpha = 1/2 has the law of 1/(2 N^2)
  const int n = 100000;
  std::vector<double> s(n), ref(n);
  RngStream other(12, 0);
  for (int i = 0; i < n; ++i) {
    s[i] = sample_positive_stable(0.5, rng);
    const double z = other.standard_normal();
    ref[i] = 1.0 / (2.0 * z * z);
  }
  CHECK(kolmogorov_two_sample(s, ref) < 0.01);

  // Laplace transform at t = 1
  const int m = 1000000;
  double sum = 0.0, sum2 = 0.0;
  for (int i = 0; i < m; ++i) {
    const double e = std::exp(-sample_positive_stable(0.7, rng));
    sum += e;
    sum2 += e * e;
  }
  const double mean = sum / m;
  const double se = std::sqrt((sum2 / m - mean * mean) / m);
  CHECK(std::abs(mean - std::exp(-1.0)) < 3.0 * se);

  for (int a = 1; a <= 9; ++a) {
    bool positive = true;
    for (int i = 0; i < 100000; ++i) positive = positive && sample_positive_stable(a / 10.0, rng) > 0.0;
    CHECK(positive);
  }
}

TEST_CASE("finite differences") {
  auto sq = [](const Eigen::VectorXd& x) { return x(0) * x(0); };
  CHECK(std::abs(finite_diff_gradient(sq, Eigen::VectorXd::Constant(1, 3.0), 1e-5)(0) - 6.0) < 1e-8);
  auto c = [](const Eigen::VectorXd&) { return 4.0; };
  CHECK(finite_diff_gradient(c, Eigen::Vector3d(1, 2, 3)).isZero());
  auto e = [](const Eigen::VectorXd& x) { return std::exp(x(0) * x(1)); };
  const Eigen::VectorXd g = finite_diff_gradient(e, Eigen::Vector2d(1, 1));
  CHECK(std::abs(g(0) - std::numbers::e) < 1e-6);
  CHECK(std::abs(g(1) - std::numbers::e) < 1e-6);
  const Eigen::MatrixXd h = finite_diff_hessian(e, Eigen::Vector2d(1, 1), 1e-4);
  CHECK(h(0, 1) == doctest::Approx(2.0 * std::numbers::e).epsilon(1e-6));
  auto bad = [](const Eigen::VectorXd& x) { return x(0) > 0 ? NAN : 0.0; };
  CHECK_THROWS_AS(finite_diff_gradient(bad, Eigen::VectorXd::Zero(1)), Error);
}

TEST_CASE("lattice path on equicorrelated orthants") {
  // with all correlations 1/2 the orthant probability is 1/(p+1)
  for (int p : {4, 6}) {
    Eigen::MatrixXd cov = Eigen::MatrixXd::Constant(p, p, 0.5);
    cov.diagonal().setOnes();
    const std::vector<double> zero(static_cast<std::size_t>(p), 0.0);
    const CdfResult res = mvn_cdf(zero, cov, 1e-5);
    CHECK(res.converged);
    CHECK(std::abs(res.value - 1.0 / (p + 1)) < 3e-5);
    CHECK(mvn_cdf(zero, cov, 1e-5).value == res.value);
  }
}
