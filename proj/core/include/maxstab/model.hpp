#pragma once

#include <Eigen/Dense>

#include <functional>
#include <memory>
#include <span>
#include <vector>

#include "maxstab/core.hpp"
#include "maxstab/partitions.hpp"
#include "maxstab/rng.hpp"

namespace maxstab {

struct ModelOptions {
  /// Target accuracy of every multivariate normal CDF evaluated by the
  /// Huesler-Reiss formulas.
  double cdf_accuracy = 1e-7;
  /// Relative tolerance of the rectangle integrals behind the Dirichlet and
  /// extremal-t exponent functions and block derivatives.
  double quadrature_rel_tol = 1e-8;
};

/// Largest dimension served by the quadrature-based families.
inline constexpr int kMaxQuadratureModelDim = 3;

/// A parametric simple max-stable law on (0, inf)^k.
///
/// Instances bind one ParamVector and precompute whatever the family needs
/// (conditional Gaussian blocks for Huesler-Reiss, vertex masses for
/// extremal-t). All member functions are const and thread-safe.
class Model {
 public:
  explicit Model(ParamVector params, ModelOptions options = {});
  virtual ~Model() = default;
  Model(const Model&) = delete;
  Model& operator=(const Model&) = delete;

  const ParamVector& params() const noexcept { return params_; }
  const ModelOptions& options() const noexcept { return options_; }
  ModelId id() const noexcept { return params_.model(); }
  int dim() const noexcept { return params_.dim(); }
  int param_dim() const { return param_count(id(), dim()); }

  /// V(z); entries of z may be +inf.
  virtual double exponent(std::span<const double> z) const = 0;

  virtual bool has_block_derivatives() const { return true; }
  /// D_S(z) = -d^|S| V / prod_{i in S} dz_i, always >= 0.
  virtual double block_derivative(std::span<const double> z, SubsetIndicator s) const;
  /// D_S(z) for every nonempty S, indexed by the subset mask (entry 0 unused).
  virtual std::vector<double> block_derivatives(std::span<const double> z) const;
  /// log D_S(z) by subset mask. Families with closed forms override this to
  /// stay finite where D_S underflows.
  virtual std::vector<double> log_block_derivatives(std::span<const double> z) const;

  virtual bool has_angular_density() const { return false; }
  /// Density of the angular measure on the open face of the unit simplex
  /// spanned by `face`. Singleton faces return the point mass at the vertex.
  /// `w` is a full k-vector, zero off the face.
  virtual double angular_density(std::span<const double> w, SubsetIndicator face) const;
  /// lambda_I(z) = k |z|_1^(-|I|-1) h_I(z / |z|_1).
  double exponent_measure_density(std::span<const double> z, SubsetIndicator face) const;

  virtual bool has_pj_sampler() const { return false; }
  /// Draws the spectral vector Y with Y[j] = 1 from the law P_j of the
  /// extremal function anchored at j.
  virtual void sample_pj(int j, RngStream& rng, std::span<double> y) const;

 protected:
  void check_point(std::span<const double> z) const;
  void check_subset(SubsetIndicator s) const;
  void check_face(std::span<const double> w, SubsetIndicator face) const;

 private:
  ParamVector params_;
  ModelOptions options_;
};

std::unique_ptr<Model> make_model(const ParamVector& params, const ModelOptions& options = {});

/// Free-function conveniences over make_model.
double exponent(const ParamVector& params, std::span<const double> z);
double block_derivative(const ParamVector& params, std::span<const double> z, SubsetIndicator s);
double angular_density(const ParamVector& params, std::span<const double> w, SubsetIndicator face);
double exponent_measure_density(const ParamVector& params, std::span<const double> z, SubsetIndicator face);

/// Integral of f(w) h(w) over the whole angular measure: sum over faces I of
/// the integral over the open face of f h_I, plus vertex masses. Supported
/// for k <= 3 and families with an angular density.
double angular_integral(const Model& model, const std::function<double(std::span<const double>)>& f,
                        double rel_tol = 1e-9);

}  // namespace maxstab
