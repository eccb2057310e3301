#pragma once

#include <span>

namespace maxstab {

/// Correctly rounded sum of finite doubles (Shewchuk's partials with the
/// final half-way correction). The result is independent of the input order.
/// Falls back to plain summation when any input is not finite.
double exact_sum(std::span<const double> values);

}  // namespace maxstab
