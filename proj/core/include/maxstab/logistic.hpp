#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>

#include "maxstab/partitions.hpp"

namespace maxstab::logistic {

/// log sum_i z_i^(-1/theta), by log-sum-exp. Generic in the scalar type of
/// theta so dual numbers can carry derivatives.
template <class T>
T log_norm_sum(const T& theta, std::span<const double> z) {
  using std::exp;
  using std::log;
  double top = -std::numeric_limits<double>::infinity();
  for (double v : z) top = std::max(top, -std::log(v));
  T scaled_top = T(top) / theta;
  T acc(0.0);
  for (double v : z) acc += exp(T(-std::log(v)) / theta - scaled_top);
  return scaled_top + log(acc);
}

/// log V(z) = theta * log sum_i z_i^(-1/theta).
template <class T>
T log_exponent(const T& theta, std::span<const double> z) {
  return theta * log_norm_sum(theta, z);
}

/// log D_S(z) = sum_{i=1}^{m-1} log(i/theta - 1) + (theta - m) log sum_j z_j^(-1/theta)
///              - (1/theta + 1) sum_{i in S} log z_i,  m = |S|.
template <class T>
T log_block(const T& theta, std::span<const double> z, SubsetIndicator s) {
  using std::log;
  const int m = subset_size(s);
  T acc(0.0);
  for (int i = 1; i < m; ++i) acc += log(T(static_cast<double>(i)) / theta - 1.0);
  double log_z = 0.0;
  for (std::size_t i = 0; i < z.size(); ++i)
    if (contains(s, static_cast<int>(i))) log_z += std::log(z[i]);
  return acc + (theta - static_cast<double>(m)) * log_norm_sum(theta, z) - (1.0 / theta + 1.0) * log_z;
}

}  // namespace maxstab::logistic
