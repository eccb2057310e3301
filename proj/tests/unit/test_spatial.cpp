#include <doctest.h>

#include <cmath>

#include "maxstab/error.hpp"
#include "maxstab/mle.hpp"
#include "maxstab/simulate.hpp"
#include "maxstab/spatial.hpp"

using namespace maxstab;

namespace {

ErrorCode code_of(const SpatialConfig& c) {
  try {
    map_spatial_params(c);
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an error");
  return ErrorCode::InvalidArgument;
}

SpatialConfig line_sites() {
  SpatialConfig c;
  c.locations = Eigen::MatrixXd(3, 1);
  c.locations << 0, 1, 3;
  return c;
}

}  // namespace

TEST_CASE("Brown-Resnick variogram map") {
  const ParamVector p = map_spatial_params(line_sites());
  REQUIRE(p.model() == ModelId::huesler_reiss);
  CHECK(p.lambda2()(0, 1) == 0.25);
  CHECK(p.lambda2()(0, 2) == 0.75);
  CHECK(p.lambda2()(1, 2) == 0.5);
  CHECK(p.lambda2() == p.lambda2().transpose());

  SpatialConfig c = line_sites();
  c.alpha = 0.5;
  c.scale = 2.0;
  const ParamVector q = map_spatial_params(c);
  CHECK(q.lambda2()(0, 2) == doctest::Approx(std::sqrt(3.0) / 8.0).epsilon(1e-15));
}

TEST_CASE("Schlather correlation map") {
  SpatialConfig c = line_sites();
  c.family = SpatialFamily::schlather_powexp;
  c.nu = 3.0;
  const ParamVector p = map_spatial_params(c);
  REQUIRE(p.model() == ModelId::extremal_t);
  CHECK(p.sigma()(0, 1) == doctest::Approx(std::exp(-1.0)).epsilon(1e-15));
  CHECK(p.sigma()(0, 2) == doctest::Approx(std::exp(-3.0)).epsilon(1e-15));
  CHECK(p.sigma()(1, 1) == 1.0);
  CHECK(p.nu() == 3.0);
}

TEST_CASE("degenerate configurations") {
  SpatialConfig tri;
  tri.locations = Eigen::MatrixXd(3, 2);
  tri.locations << 0, 0, 1, 0, 0.5, std::sqrt(3.0) / 2.0;
  CHECK(code_of(tri) == ErrorCode::NotIdentifiable);
  tri.family = SpatialFamily::schlather_powexp;
  CHECK(code_of(tri) == ErrorCode::NotIdentifiable);

  SpatialConfig pair;
  pair.locations = Eigen::MatrixXd(2, 1);
  pair.locations << 0, 1;
  CHECK(code_of(pair) == ErrorCode::NotIdentifiable);

  SpatialConfig dup = line_sites();
  dup.locations(2, 0) = 1.0;
  CHECK(code_of(dup) == ErrorCode::InvalidArgument);

  SpatialConfig bad = line_sites();
  bad.alpha = 2.0;
  CHECK(code_of(bad) == ErrorCode::OutOfDomain);
  bad.alpha = 1.0;
  bad.scale = -1.0;
  CHECK(code_of(bad) == ErrorCode::OutOfDomain);
}

TEST_CASE("fit through the variogram map recovers the truth") {
  const SpatialConfig sites = line_sites();
  const Dataset data = simulate(*make_model(map_spatial_params(sites)), 500, 31);
  const Parameterization chart = brown_resnick_parameterization(sites.locations);
  FitOptions opts;
  opts.starts = 1;
  const FitResult r = fit(chart, data, brown_resnick_unconstrained(2.0, 0.7), opts);
  CHECK(r.converged);
  REQUIRE(r.wald_intervals.size() == 2);
  CHECK(r.wald_intervals[0].name == "scale");
  CHECK(r.wald_intervals[1].name == "alpha");
  for (const auto& w : r.wald_intervals) {
    CHECK(w.lower < 1.0);
    CHECK(w.upper > 1.0);
  }
  CHECK(r.wald_intervals[1].upper < 2.0);
}
