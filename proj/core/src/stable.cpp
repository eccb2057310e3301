#include "maxstab/stable.hpp"

#include <cmath>
#include <numbers>

#include "maxstab/error.hpp"

namespace maxstab {

double sample_positive_stable(double alpha, RngStream& rng) {
  require(alpha > 0.0 && alpha <= 1.0, ErrorCode::OutOfDomain, "stable index must lie in (0, 1]");
  if (alpha == 1.0) return 1.0;
  const double u = std::numbers::pi * rng.uniform();
  const double e = rng.exponential();
  const double a = std::sin(alpha * u) / std::pow(std::sin(u), 1.0 / alpha);
  const double b = std::pow(std::sin((1.0 - alpha) * u) / e, (1.0 - alpha) / alpha);
  return a * b;
}

}  // namespace maxstab
