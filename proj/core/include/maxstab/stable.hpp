#pragma once

#include "maxstab/rng.hpp"

namespace maxstab {

/// Positive alpha-stable variate with Laplace transform exp(-t^alpha),
/// drawn by the Chambers-Mallows-Stuck (Kanter) construction.
/// alpha = 1 returns exactly 1. Throws OutOfDomain unless 0 < alpha <= 1.
double sample_positive_stable(double alpha, RngStream& rng);

}  // namespace maxstab
