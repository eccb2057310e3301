#include "maxstab/simulate.hpp"

#include <cmath>

#include "maxstab/error.hpp"
#include "maxstab/parallel.hpp"
#include "maxstab/stable.hpp"

namespace maxstab {

Observation sample_logistic(double theta, int dim, RngStream& rng) {
  require(theta > 0.0 && theta < 1.0, ErrorCode::OutOfDomain, "logistic theta must lie in (0, 1)");
  require(dim >= 1, ErrorCode::OutOfDomain, "dimension must be at least 1");
  const double t = sample_positive_stable(theta, rng);
  Observation z(dim);
  for (int i = 0; i < dim; ++i) z(i) = std::pow(t / rng.exponential(), theta);
  return z;
}

SpectralFunction sample_pj(const Model& model, int j, RngStream& rng) {
  require(model.has_pj_sampler(), ErrorCode::UnsupportedModel, "model has no extremal-function sampler");
  SpectralFunction out;
  out.anchor = j;
  out.y.resize(model.dim());
  model.sample_pj(j, rng, {out.y.data(), static_cast<std::size_t>(model.dim())});
  return out;
}

Observation sample_extremal_functions(const Model& model, RngStream& rng) {
  require(model.has_pj_sampler(), ErrorCode::UnsupportedModel, "model has no extremal-function sampler");
  const int k = model.dim();
  const auto ku = static_cast<std::size_t>(k);
  Eigen::VectorXd y(k);
  std::span<double> ys{y.data(), ku};

  double arrival = rng.exponential();
  model.sample_pj(0, rng, ys);
  Observation z = y / arrival;

  std::int64_t proposals = 0;
  for (int j = 1; j < k; ++j) {
    arrival = rng.exponential();
    double zeta = 1.0 / arrival;
    while (zeta > z(j)) {
      require(++proposals <= kMaxExtremalProposals, ErrorCode::IterationGuard,
              "extremal-function sweep exceeded its proposal budget");
      model.sample_pj(j, rng, ys);
      bool fresh = true;
      for (int i = 0; i < j && fresh; ++i) fresh = zeta * y(i) < z(i);
      if (fresh) z = z.cwiseMax(zeta * y);
      arrival += rng.exponential();
      zeta = 1.0 / arrival;
    }
  }
  return z;
}

Observation simulate_one(const Model& model, RngStream& rng, SimulationMethod method) {
  if (method == SimulationMethod::automatic)
    method = model.id() == ModelId::logistic ? SimulationMethod::logistic_direct : SimulationMethod::extremal_functions;
  if (method == SimulationMethod::logistic_direct) {
    require(model.id() == ModelId::logistic, ErrorCode::UnsupportedModel,
            "the direct construction applies to the logistic family only");
    return sample_logistic(model.params().theta(), model.dim(), rng);
  }
  return sample_extremal_functions(model, rng);
}

Dataset simulate(const Model& model, int n, std::uint64_t seed, int threads, SimulationMethod method,
                 std::uint64_t first_stream) {
  require(n >= 1, ErrorCode::EmptyData, "sample size must be positive");
  Dataset::Matrix rows(n, model.dim());
  parallel_for(static_cast<std::size_t>(n), threads, [&](std::size_t i) {
    RngStream rng(seed, first_stream + i);
    rows.row(static_cast<Eigen::Index>(i)) = simulate_one(model, rng, method).transpose();
  });
  return Dataset(std::move(rows));
}

}  // namespace maxstab
