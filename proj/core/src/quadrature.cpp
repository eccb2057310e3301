#include "maxstab/quadrature.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <queue>
#include <vector>

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "maxstab/error.hpp"

namespace maxstab {

namespace {

struct Region {
  std::array<double, kMaxQuadratureDim> center{};
  std::array<double, kMaxQuadratureDim> half{};
  double value = 0.0;
  double error = 0.0;
  int split_axis = 0;

  bool operator<(const Region& other) const { return error < other.error; }
};

class GenzMalik {
 public:
  explicit GenzMalik(int dim) : dim_(dim) {
    const double n = dim;
    w1_ = (12824.0 - 9120.0 * n + 400.0 * n * n) / 19683.0;
    w2_ = 980.0 / 6561.0;
    w3_ = (1820.0 - 400.0 * n) / 19683.0;
    w4_ = 200.0 / 19683.0;
    w5_ = 6859.0 / 19683.0 / static_cast<double>(1 << dim);
    e1_ = (729.0 - 950.0 * n + 50.0 * n * n) / 729.0;
    e2_ = 245.0 / 486.0;
    e3_ = (265.0 - 100.0 * n) / 1458.0;
    e4_ = 25.0 / 729.0;
  }

  void apply(const BoxIntegrand& f, Region& r) const {
    const auto d = static_cast<std::size_t>(dim_);
    std::array<double, kMaxQuadratureDim> x{};
    auto eval = [&]() {
      const double v = f({x.data(), d});
      if (!std::isfinite(v)) fail(ErrorCode::NonFiniteIntegrand, "integrand returned a non-finite value");
      return v;
    };
    x = r.center;
    const double f0 = eval();
    double sum2 = 0.0, sum3 = 0.0, sum4 = 0.0, sum5 = 0.0;
    const double ratio = (kLambda2 * kLambda2) / (kLambda4 * kLambda4);
    double worst = -1.0;
    for (std::size_t i = 0; i < d; ++i) {
      double v[4];
      const double steps[4] = {-kLambda2, kLambda2, -kLambda4, kLambda4};
      for (int s = 0; s < 4; ++s) {
        x = r.center;
        x[i] += steps[s] * r.half[i];
        v[s] = eval();
      }
      sum2 += v[0] + v[1];
      sum3 += v[2] + v[3];
      const double diff = std::abs(v[0] + v[1] - 2.0 * f0 - ratio * (v[2] + v[3] - 2.0 * f0));
      if (diff > worst) {
        worst = diff;
        r.split_axis = static_cast<int>(i);
      }
    }
    for (std::size_t i = 0; i < d; ++i) {
      for (std::size_t j = i + 1; j < d; ++j) {
        for (double si : {-1.0, 1.0}) {
          for (double sj : {-1.0, 1.0}) {
            x = r.center;
            x[i] += si * kLambda4 * r.half[i];
            x[j] += sj * kLambda4 * r.half[j];
            sum4 += eval();
          }
        }
      }
    }
    for (unsigned mask = 0; mask < (1U << d); ++mask) {
      for (std::size_t i = 0; i < d; ++i) {
        x[i] = r.center[i] + (((mask >> i) & 1U) ? kLambda5 : -kLambda5) * r.half[i];
      }
      sum5 += eval();
    }
    double volume = 1.0;
    for (std::size_t i = 0; i < d; ++i) volume *= 2.0 * r.half[i];
    r.value = volume * (w1_ * f0 + w2_ * sum2 + w3_ * sum3 + w4_ * sum4 + w5_ * sum5);
    const double lower_order = volume * (e1_ * f0 + e2_ * sum2 + e3_ * sum3 + e4_ * sum4);
    r.error = std::abs(r.value - lower_order);
  }

 private:
  static constexpr double kLambda2 = 0.35856858280031809199;  // sqrt(9/70)
  static constexpr double kLambda4 = 0.94868329805051379960;  // sqrt(9/10)
  static constexpr double kLambda5 = 0.68824720161168529772;  // sqrt(9/19)

  int dim_;
  double w1_, w2_, w3_, w4_, w5_;
  double e1_, e2_, e3_, e4_;
};

class GaussKronrod15 {
 public:
  void apply(const BoxIntegrand& f, Region& r) const {
    using Kronrod = boost::math::quadrature::gauss_kronrod<double, 15>;
    using Gauss = boost::math::quadrature::gauss<double, 7>;
    const auto& xk = Kronrod::abscissa();
    const auto& wk = Kronrod::weights();
    const auto& wg = Gauss::weights();
    auto eval = [&](double x) {
      const double v = f({&x, 1});
      if (!std::isfinite(v)) fail(ErrorCode::NonFiniteIntegrand, "integrand returned a non-finite value");
      return v;
    };
    const double c = r.center[0];
    const double h = r.half[0];
    const double f0 = eval(c);
    double kronrod = wk[0] * f0;
    double gauss = wg[0] * f0;
    for (std::size_t i = 1; i < xk.size(); ++i) {
      const double pair = eval(c - h * xk[i]) + eval(c + h * xk[i]);
      kronrod += wk[i] * pair;
      // Gauss nodes are the even-indexed Kronrod nodes
      if (i % 2 == 0) gauss += wg[i / 2] * pair;
    }
    r.value = h * kronrod;
    r.error = std::abs(h * (kronrod - gauss));
    r.split_axis = 0;
  }
};

template <class Rule>
QuadratureResult adapt(const Rule& rule, const BoxIntegrand& f, std::span<const double> lower,
                       std::span<const double> upper, const QuadratureOptions& options) {
  const auto dim = lower.size();
  const int cells = std::max(options.initial_cells, 1);
  std::priority_queue<Region> heap;
  double value = 0.0;
  double error = 0.0;
  int regions = 0;
  std::array<int, kMaxQuadratureDim> idx{};
  while (true) {
    Region r;
    for (std::size_t i = 0; i < dim; ++i) {
      r.half[i] = 0.5 * (upper[i] - lower[i]) / cells;
      r.center[i] = lower[i] + (2 * idx[i] + 1) * r.half[i];
    }
    rule.apply(f, r);
    value += r.value;
    error += r.error;
    heap.push(r);
    ++regions;
    std::size_t i = 0;
    for (; i < dim; ++i) {
      if (++idx[i] < cells) break;
      idx[i] = 0;
    }
    if (i == dim) break;
  }
  while (error > std::max(options.abs_tol, options.rel_tol * std::abs(value))) {
    if (regions >= options.max_subdivisions) {
      fail(ErrorCode::MaxSubdivisions, "cubature did not reach the requested tolerance");
    }
    Region worst = heap.top();
    heap.pop();
    value -= worst.value;
    error -= worst.error;
    const auto axis = static_cast<std::size_t>(worst.split_axis);
    Region left = worst, right = worst;
    left.half[axis] *= 0.5;
    right.half[axis] *= 0.5;
    left.center[axis] -= left.half[axis];
    right.center[axis] += right.half[axis];
    rule.apply(f, left);
    rule.apply(f, right);
    value += left.value + right.value;
    error += left.error + right.error;
    heap.push(left);
    heap.push(right);
    ++regions;
    // the running totals drift under cancellation; refresh them periodically
    if (regions % 256 == 0) {
      auto copy = heap;
      value = 0.0;
      error = 0.0;
      while (!copy.empty()) {
        value += copy.top().value;
        error += copy.top().error;
        copy.pop();
      }
    }
  }
  return {value, error, regions};
}

}  // namespace

QuadratureResult integrate_box(const BoxIntegrand& f, std::span<const double> lower,
                               std::span<const double> upper, const QuadratureOptions& options) {
  require(lower.size() == upper.size(), ErrorCode::ShapeMismatch, "box limits have different lengths");
  const int dim = static_cast<int>(lower.size());
  require(dim >= 1, ErrorCode::ShapeMismatch, "box must have at least one dimension");
  require(dim <= kMaxQuadratureDim, ErrorCode::DimensionTooLarge, "integrate_box supports at most 3 dimensions");
  for (int i = 0; i < dim; ++i) {
    require(std::isfinite(lower[i]) && std::isfinite(upper[i]), ErrorCode::NonFinite,
            "box limits must be finite");
  }
  if (dim == 1) return adapt(GaussKronrod15{}, f, lower, upper, options);
  return adapt(GenzMalik(dim), f, lower, upper, options);
}

double integrate_box(const BoxIntegrand& f, std::span<const double> lower, std::span<const double> upper,
                     double tol) {
  QuadratureOptions options;
  options.abs_tol = tol;
  options.rel_tol = tol;
  return integrate_box(f, lower, upper, options).value;
}

QuadratureResult integrate_orthant(const BoxIntegrand& f, std::span<const double> upper,
                                   const QuadratureOptions& options, double width) {
  const std::size_t dim = upper.size();
  require(dim >= 1 && dim <= kMaxQuadratureDim, ErrorCode::DimensionTooLarge,
          "integrate_orthant supports 1 to 3 dimensions");
  std::array<double, kMaxQuadratureDim> lo{}, hi{};
  for (std::size_t i = 0; i < dim; ++i) {
    require(upper[i] > 0.0, ErrorCode::OutOfDomain, "orthant upper limits must be positive");
    if (std::isinf(upper[i])) {
      lo[i] = -width;
      hi[i] = width;
    } else {
      hi[i] = std::log(upper[i]);
      lo[i] = hi[i] - width;
    }
  }
  auto g = [&](std::span<const double> t) {
    std::array<double, kMaxQuadratureDim> u{};
    double jac = 1.0;
    for (std::size_t i = 0; i < dim; ++i) {
      u[i] = std::exp(t[i]);
      jac *= u[i];
    }
    const double v = f({u.data(), dim});
    return v == 0.0 ? 0.0 : v * jac;
  };
  return integrate_box(g, {lo.data(), dim}, {hi.data(), dim}, options);
}

}  // namespace maxstab
