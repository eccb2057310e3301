#include "maxstab/model.hpp"

#include <cmath>
#include <limits>

#include "maxstab/error.hpp"
#include "maxstab/quadrature.hpp"
#include "model_factories.hpp"

namespace maxstab {

Model::Model(ParamVector params, ModelOptions options) : params_(std::move(params)), options_(options) {}

double Model::block_derivative(std::span<const double>, SubsetIndicator) const {
  fail(ErrorCode::UnsupportedModel,
       std::string("block derivatives are not available for the ") + std::string(to_string(id())) + " model");
}

std::vector<double> Model::block_derivatives(std::span<const double> z) const {
  check_point(z);
  const SubsetIndicator full = full_set(dim());
  std::vector<double> out(static_cast<std::size_t>(full) + 1, 0.0);
  for (SubsetIndicator s = 1; s <= full; ++s) out[s] = block_derivative(z, s);
  return out;
}

std::vector<double> Model::log_block_derivatives(std::span<const double> z) const {
  std::vector<double> out = block_derivatives(z);
  for (double& v : out) v = std::log(v);
  return out;
}

double Model::angular_density(std::span<const double>, SubsetIndicator) const {
  fail(ErrorCode::UnsupportedModel,
       std::string("no angular density is implemented for the ") + std::string(to_string(id())) + " model");
}

double Model::exponent_measure_density(std::span<const double> z, SubsetIndicator face) const {
  require(static_cast<int>(z.size()) == dim(), ErrorCode::ShapeMismatch, "point has the wrong dimension");
  double norm = 0.0;
  for (double v : z) norm += v;
  require(norm > 0.0 && std::isfinite(norm), ErrorCode::NotOnFace, "point must have a finite positive l1 norm");
  std::vector<double> w(z.begin(), z.end());
  for (double& v : w) v /= norm;
  const double m = subset_size(face);
  return dim() * std::pow(norm, -m - 1.0) * angular_density(w, face);
}

void Model::sample_pj(int, RngStream&, std::span<double>) const {
  fail(ErrorCode::UnsupportedModel,
       std::string("no extremal-function sampler for the ") + std::string(to_string(id())) + " model");
}

void Model::check_point(std::span<const double> z) const {
  require(static_cast<int>(z.size()) == dim(), ErrorCode::ShapeMismatch, "point has the wrong dimension");
  for (double v : z) {
    require(!std::isnan(v), ErrorCode::NonFinite, "point has a NaN component");
    require(v > 0.0, ErrorCode::OutOfDomain, "point components must be strictly positive");
  }
}

void Model::check_subset(SubsetIndicator s) const {
  require(s != 0 && s <= full_set(dim()), ErrorCode::InvalidArgument, "subset must be a nonempty subset of {1..k}");
}

void Model::check_face(std::span<const double> w, SubsetIndicator face) const {
  require(static_cast<int>(w.size()) == dim(), ErrorCode::ShapeMismatch, "simplex point has the wrong dimension");
  check_subset(face);
  double sum = 0.0;
  for (int i = 0; i < dim(); ++i) {
    const double v = w[static_cast<std::size_t>(i)];
    if (contains(face, i)) {
      require(v > 0.0, ErrorCode::NotOnFace, "simplex point must be positive on the face");
    } else {
      require(v == 0.0, ErrorCode::NotOnFace, "simplex point must vanish off the face");
    }
    sum += v;
  }
  require(std::abs(sum - 1.0) < 1e-9, ErrorCode::NotOnFace, "simplex point must sum to 1");
}

std::unique_ptr<Model> make_model(const ParamVector& params, const ModelOptions& options) {
  switch (params.model()) {
    case ModelId::logistic: return detail::make_logistic(params, options);
    case ModelId::huesler_reiss: return detail::make_huesler_reiss(params, options);
    case ModelId::dirichlet: return detail::make_dirichlet(params, options);
    case ModelId::extremal_t: return detail::make_extremal_t(params, options);
  }
  fail(ErrorCode::UnsupportedModel, "unknown model");
}

double exponent(const ParamVector& params, std::span<const double> z) { return make_model(params)->exponent(z); }

double block_derivative(const ParamVector& params, std::span<const double> z, SubsetIndicator s) {
  return make_model(params)->block_derivative(z, s);
}

double angular_density(const ParamVector& params, std::span<const double> w, SubsetIndicator face) {
  return make_model(params)->angular_density(w, face);
}

double exponent_measure_density(const ParamVector& params, std::span<const double> z, SubsetIndicator face) {
  return make_model(params)->exponent_measure_density(z, face);
}

namespace {

constexpr double kSimplexHalfWidth = 80.0;

}  // namespace

double angular_integral(const Model& model, const std::function<double(std::span<const double>)>& f,
                        double rel_tol) {
  require(model.has_angular_density(), ErrorCode::UnsupportedModel, "model has no angular density");
  const int k = model.dim();
  require(k <= kMaxQuadratureModelDim, ErrorCode::DimensionTooLarge, "angular integrals need k <= 3");
  QuadratureOptions opts;
  opts.rel_tol = rel_tol;
  opts.abs_tol = 1e-14;
  opts.initial_cells = 16;
  double total = 0.0;
  std::vector<double> w(static_cast<std::size_t>(k), 0.0);
  for (SubsetIndicator face = 1; face <= full_set(k); ++face) {
    std::vector<int> idx;
    for (int i = 0; i < k; ++i)
      if (contains(face, i)) idx.push_back(i);
    std::fill(w.begin(), w.end(), 0.0);
    if (idx.size() == 1) {
      w[static_cast<std::size_t>(idx[0])] = 1.0;
      total += f(w) * model.angular_density(w, face);
      continue;
    }
    // additive log-ratio chart: the last face coordinate is the reference
    const std::size_t m = idx.size() - 1;
    auto integrand = [&](std::span<const double> x) {
      std::vector<double> local(static_cast<std::size_t>(k), 0.0);
      double top = 0.0;
      for (double v : x) top = std::max(top, v);
      double denom = std::exp(-top);
      for (double v : x) denom += std::exp(v - top);
      double jac = 1.0;
      for (std::size_t a = 0; a < m; ++a) {
        local[static_cast<std::size_t>(idx[a])] = std::exp(x[a] - top) / denom;
        jac *= local[static_cast<std::size_t>(idx[a])];
      }
      local[static_cast<std::size_t>(idx[m])] = std::exp(-top) / denom;
      jac *= local[static_cast<std::size_t>(idx[m])];
      if (jac == 0.0) return 0.0;
      for (int i : idx)
        if (local[static_cast<std::size_t>(i)] == 0.0) return 0.0;
      return f(local) * model.angular_density(local, face) * jac;
    };
    std::vector<double> lo(m, -kSimplexHalfWidth), hi(m, kSimplexHalfWidth);
    total += integrate_box(integrand, lo, hi, opts).value;
  }
  return total;
}

}  // namespace maxstab

namespace maxstab::detail {

double exponent_from_faces(int k, std::span<const double> z, bool lower_faces, const FaceDensity& density,
                           const QuadratureOptions& options, double log_width) {
  const SubsetIndicator full = full_set(k);
  double total = 0.0;
  std::vector<double> y(static_cast<std::size_t>(k), 0.0);
  for (SubsetIndicator face = lower_faces ? 1 : full; face <= full; ++face) {
    for (int i = 0; i < k; ++i) {
      if (!contains(face, i) || std::isinf(z[static_cast<std::size_t>(i)])) continue;
      const double zi = z[static_cast<std::size_t>(i)];
      std::vector<int> rest;
      std::vector<double> bound;
      for (int j = 0; j < k; ++j) {
        if (j == i || !contains(face, j)) continue;
        rest.push_back(j);
        bound.push_back(z[static_cast<std::size_t>(j)] / zi);
      }
      std::fill(y.begin(), y.end(), 0.0);
      y[static_cast<std::size_t>(i)] = 1.0;
      if (rest.empty()) {
        total += density(y, face) / zi;
        continue;
      }
      auto integrand = [&](std::span<const double> u) {
        std::vector<double> point(static_cast<std::size_t>(k), 0.0);
        point[static_cast<std::size_t>(i)] = 1.0;
        for (std::size_t a = 0; a < rest.size(); ++a) point[static_cast<std::size_t>(rest[a])] = u[a];
        return density(point, face);
      };
      total += integrate_orthant(integrand, bound, options, log_width).value / zi;
    }
  }
  return total;
}

double block_from_density(int k, std::span<const double> z, SubsetIndicator s, const FaceDensity& density,
                          const QuadratureOptions& options, double log_width) {
  const SubsetIndicator full = full_set(k);
  if (s == full) return density(z, full);
  std::vector<int> rest;
  std::vector<double> bound;
  for (int j = 0; j < k; ++j) {
    if (contains(s, j)) continue;
    rest.push_back(j);
    bound.push_back(z[static_cast<std::size_t>(j)]);
  }
  auto integrand = [&](std::span<const double> u) {
    std::vector<double> point(z.begin(), z.end());
    for (std::size_t a = 0; a < rest.size(); ++a) point[static_cast<std::size_t>(rest[a])] = u[a];
    return density(point, full);
  };
  return integrate_orthant(integrand, bound, options, log_width).value;
}

}  // namespace maxstab::detail
