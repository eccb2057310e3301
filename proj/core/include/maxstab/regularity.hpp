#pragma once

#include <Eigen/Dense>

#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "maxstab/core.hpp"
#include "maxstab/model.hpp"

namespace maxstab {

/// Finite point set on which the envelope conditions are audited.
struct Grid {
  enum class Kind { sphere, simplex };
  Kind kind = Kind::sphere;
  std::vector<Eigen::VectorXd> points;
  int per_axis = 0;
  double min_coordinate = 1e-6;
};

inline constexpr double kGridMinCoordinate = 1e-6;
inline constexpr double kRatioTolerance = 1e-9;

/// Points of {|z|_inf = 1}: on each face z_i = 1 the other coordinates run over
/// a log-spaced tensor grid on [min_coordinate, 1].
Grid sphere_grid(int dim, int per_axis, double min_coordinate = kGridMinCoordinate);

/// Interior points of the unit simplex from a tensor grid in barycentric
/// coordinates, every coordinate at least min_coordinate. The axis values are
/// log-spaced towards both ends of (0, 1).
Grid simplex_grid(int dim, int per_axis, double min_coordinate = kGridMinCoordinate);

/// Points per axis giving about `factor` times as many grid points.
int refined_per_axis(int per_axis, int dim, double factor = 4.0);

/// c(z) = A sum_i z_i^(-alpha).
struct A3Envelope {
  double a = 1.0;
  double alpha = 0.0;
};

/// h >= B- prod w_i^(beta-_i - 1) and |d h / d theta|_inf <= B+ prod w_i^(beta+_i - 1).
struct B3Envelope {
  double b_minus = 1.0;
  double b_plus = 1.0;
  Eigen::VectorXd beta_minus;
  Eigen::VectorXd beta_plus;
  double epsilon = 0.0;
};

/// Exponents used when none are supplied: beta- = alpha for Dirichlet and 1/nu
/// for extremal-t, epsilon = 0.45 / sum beta-, beta+ = beta- / (1 + epsilon / 2).
B3Envelope default_b3_exponents(const ParamVector& params);

struct CheckEntry {
  std::string name;
  int grid_size = 0;
  double worst_ratio = 0.0;
  bool pass = false;
  std::vector<double> witness;
  /// Extra numbers describing the check (constants, tolerances).
  nlohmann::json details = nlohmann::json::object();
};

struct RegularityReport {
  ModelId model = ModelId::logistic;
  Eigen::VectorXd params;
  std::vector<CheckEntry> checks;
  std::optional<A3Envelope> a3;
  std::optional<B3Envelope> b3;

  bool all_pass() const;
};

struct RegularityOptions {
  /// Central-difference step for parameter derivatives, scaled by max(1, |theta|).
  double step = 1e-5;
  int threads = 1;
  ModelOptions model;
};

/// max over grid points and blocks S of |d log V|_inf / c(z) and
/// |d log D_S|_inf / c(z), derivatives in the natural parameters.
/// Throws OutOfDomain unless 0 <= alpha < 1/2 and A > 0; UnsupportedModel
/// without block derivatives.
CheckEntry check_a3(const ParamVector& params, const A3Envelope& envelope, const Grid& grid,
                    const RegularityOptions& options = {});

/// The lower and upper B3 inequalities on a simplex grid (two entries).
/// Throws OutOfDomain on malformed exponents.
std::vector<CheckEntry> check_b3(const ParamVector& params, const B3Envelope& envelope, const Grid& grid,
                                 const RegularityOptions& options = {});

/// Smallest A for the given alpha making A3 hold on the grid. Throws
/// Infeasible when a ratio is not finite, InvalidArgument on an empty grid.
A3Envelope fit_a3_envelope(const ParamVector& params, double alpha, const Grid& grid,
                           const RegularityOptions& options = {});

/// Largest B- and smallest B+ for the supplied exponents.
B3Envelope fit_b3_envelope(const ParamVector& params, const B3Envelope& exponents, const Grid& grid,
                           const RegularityOptions& options = {});

struct AuditOptions {
  int per_axis = 500;
  /// Fitted constants are loosened by this factor before verification.
  double margin = 1.1;
  double refine_factor = 4.0;
  RegularityOptions regularity;
};

/// Fit the A3 constant on a grid, then verify it on a refined grid.
RegularityReport audit_a3(const ParamVector& params, double alpha, const AuditOptions& options = {});

/// Fit the B3 constants on a grid, then verify them on a refined grid.
RegularityReport audit_b3(const ParamVector& params, const std::optional<B3Envelope>& exponents = std::nullopt,
                          const AuditOptions& options = {});

struct StructureOptions {
  double homogeneity_closed_form_tol = 1e-8;
  double homogeneity_quadrature_tol = 1e-5;
  double normalization_tol = 1e-6;
  double moment_tol = 1e-4;
  double density_tol = 1e-4;
};

/// Homogeneity, normalization, angular moment and lambda/h consistency.
/// Each entry's worst_ratio is the largest error divided by its tolerance.
/// Checks that do not apply to the family are left out.
RegularityReport check_structure(const Model& model, const StructureOptions& options = {});
RegularityReport check_structure(const ParamVector& params, const StructureOptions& options = {});

nlohmann::json to_json(const RegularityReport& report);

/// Parameters rebuilt from the natural vector layout of ParamVector::natural.
ParamVector params_from_natural(ModelId model, int dim, const Eigen::VectorXd& natural);

}  // namespace maxstab
