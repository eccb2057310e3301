#pragma once

#include <Eigen/Dense>

#include <cstdint>

#include "maxstab/core.hpp"
#include "maxstab/model.hpp"
#include "maxstab/rng.hpp"

namespace maxstab {

/// A spectral vector normalized at its anchor coordinate.
struct SpectralFunction {
  Eigen::VectorXd y;
  int anchor = 0;
};

/// Exact logistic draw Z_i = T^theta E_i^(-theta), T positive stable(theta),
/// E_i iid unit exponential.
Observation sample_logistic(double theta, int dim, RngStream& rng);

/// Draw from P_j, the law of the extremal function anchored at j (0-based).
SpectralFunction sample_pj(const Model& model, int j, RngStream& rng);

/// Upper bound on Poisson proposals per observation; exceeding it signals a
/// broken P_j sampler.
inline constexpr std::int64_t kMaxExtremalProposals = 1'000'000;

/// Exact draw by the extremal-functions coordinate sweep.
Observation sample_extremal_functions(const Model& model, RngStream& rng);

enum class SimulationMethod { automatic, extremal_functions, logistic_direct };

/// One observation; `automatic` uses the direct construction for the logistic
/// family and extremal functions otherwise.
Observation simulate_one(const Model& model, RngStream& rng, SimulationMethod method = SimulationMethod::automatic);

/// n observations; row i is drawn from RngStream(seed, first_stream + i), so the
/// output is independent of the thread count.
Dataset simulate(const Model& model, int n, std::uint64_t seed, int threads = 1,
                 SimulationMethod method = SimulationMethod::automatic, std::uint64_t first_stream = 0);

}  // namespace maxstab
