#include "maxstab/regularity.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>

#include "maxstab/error.hpp"
#include "maxstab/io.hpp"
#include "maxstab/parallel.hpp"

namespace maxstab {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::vector<double> log_spaced(double lo, double hi, int count) {
  std::vector<double> out(static_cast<std::size_t>(count));
  if (count == 1) {
    out[0] = hi;
    return out;
  }
  const double a = std::log(lo), b = std::log(hi);
  for (int j = 0; j < count; ++j) out[static_cast<std::size_t>(j)] = std::exp(a + (b - a) * j / (count - 1));
  out.back() = hi;
  return out;
}

// Calls visit(values) for every tuple of `dims` entries drawn from axis.
void tensor(const std::vector<double>& axis, int dims, const std::function<void(const std::vector<double>&)>& visit) {
  std::vector<std::size_t> idx(static_cast<std::size_t>(dims), 0);
  std::vector<double> values(static_cast<std::size_t>(dims));
  while (true) {
    for (int d = 0; d < dims; ++d) values[static_cast<std::size_t>(d)] = axis[idx[static_cast<std::size_t>(d)]];
    visit(values);
    int d = 0;
    for (; d < dims; ++d) {
      if (++idx[static_cast<std::size_t>(d)] < axis.size()) break;
      idx[static_cast<std::size_t>(d)] = 0;
    }
    if (d == dims) return;
  }
}

struct Worst {
  double ratio = -kInf;
  std::size_t index = 0;
};

// Largest value with its first index; NaN counts as +inf.
Worst indexed_max(const std::vector<double>& values) {
  Worst w;
  for (std::size_t i = 0; i < values.size(); ++i) {
    const double v = std::isnan(values[i]) ? kInf : values[i];
    if (v > w.ratio) {
      w.ratio = v;
      w.index = i;
    }
  }
  return w;
}

std::vector<double> as_vector(const Eigen::VectorXd& v) { return {v.data(), v.data() + v.size()}; }

using Quantities = std::function<std::vector<double>(const Model&, const Eigen::VectorXd&)>;

// For every grid point, the infinity norm over natural parameters of the
// central-difference derivative of each quantity.
std::vector<std::vector<double>> derivative_norms(const ParamVector& params, const Grid& grid, const Quantities& q,
                                                  const RegularityOptions& options) {
  const Eigen::VectorXd theta = params.natural();
  const std::size_t n = grid.points.size();
  std::vector<std::vector<double>> norms(n);
  for (Eigen::Index a = 0; a < theta.size(); ++a) {
    const double h = options.step * std::max(1.0, std::abs(theta(a)));
    Eigen::VectorXd up = theta, down = theta;
    up(a) += h;
    down(a) -= h;
    const auto mp = make_model(params_from_natural(params.model(), params.dim(), up), options.model);
    const auto mm = make_model(params_from_natural(params.model(), params.dim(), down), options.model);
    parallel_for(n, options.threads, [&](std::size_t i) {
      const std::vector<double> fp = q(*mp, grid.points[i]);
      const std::vector<double> fm = q(*mm, grid.points[i]);
      auto& out = norms[i];
      if (out.empty()) out.assign(fp.size(), 0.0);
      for (std::size_t j = 0; j < fp.size(); ++j) {
        const double g = std::abs(fp[j] - fm[j]) / (up(a) - down(a));
        out[j] = std::isnan(g) ? kInf : std::max(out[j], g);
      }
    });
  }
  return norms;
}

std::vector<double> log_v_and_blocks(const Model& m, const Eigen::VectorXd& z) {
  const std::span<const double> zs{z.data(), static_cast<std::size_t>(z.size())};
  std::vector<double> out = m.log_block_derivatives(zs);
  out[0] = std::log(m.exponent(zs));
  return out;
}

double interior_density(const Model& m, const Eigen::VectorXd& w) {
  return m.angular_density({w.data(), static_cast<std::size_t>(w.size())}, full_set(m.dim()));
}

// max over quantities of the derivative norm at each point
std::vector<double> a3_numerators(const ParamVector& params, const Grid& grid, const RegularityOptions& options) {
  require(!grid.points.empty(), ErrorCode::InvalidArgument, "grid is empty");
  const auto probe = make_model(params, options.model);
  require(probe->has_block_derivatives(), ErrorCode::UnsupportedModel, "A3 needs block derivatives");
  const auto norms = derivative_norms(params, grid, log_v_and_blocks, options);
  std::vector<double> out(norms.size());
  for (std::size_t i = 0; i < norms.size(); ++i) out[i] = *std::max_element(norms[i].begin(), norms[i].end());
  return out;
}

double a3_weight(const Eigen::VectorXd& z, double alpha) { return z.array().pow(-alpha).sum(); }

double product_weight(const Eigen::VectorXd& w, const Eigen::VectorXd& beta) {
  return (w.array().log() * (beta.array() - 1.0)).sum();
}

void check_alpha(double alpha) {
  require(alpha >= 0.0 && alpha < 0.5, ErrorCode::OutOfDomain, "A3 exponent alpha must lie in [0, 1/2)");
}

void check_b3_exponents(const B3Envelope& e, int dim) {
  require(e.beta_minus.size() == dim && e.beta_plus.size() == dim, ErrorCode::ShapeMismatch,
          "B3 exponent vectors must have one entry per coordinate");
  for (int i = 0; i < dim; ++i) {
    require(e.beta_plus(i) > 0.0 && e.beta_plus(i) < e.beta_minus(i) &&
                e.beta_minus(i) < (1.0 + e.epsilon) * e.beta_plus(i),
            ErrorCode::OutOfDomain, "B3 exponents must satisfy 0 < beta+ < beta- < (1 + epsilon) beta+");
  }
  require(e.epsilon > 0.0 && 2.0 * e.epsilon * e.beta_minus.sum() < 1.0, ErrorCode::OutOfDomain,
          "B3 requires 0 < 2 epsilon < 1 / sum(beta-)");
}

struct B3Pieces {
  std::vector<double> density;
  std::vector<double> derivative;
};

B3Pieces b3_pieces(const ParamVector& params, const Grid& grid, const RegularityOptions& options) {
  require(!grid.points.empty(), ErrorCode::InvalidArgument, "grid is empty");
  const auto model = make_model(params, options.model);
  require(model->has_angular_density(), ErrorCode::UnsupportedModel, "B3 needs an angular density");
  B3Pieces out;
  out.density.resize(grid.points.size());
  parallel_for(grid.points.size(), options.threads,
               [&](std::size_t i) { out.density[i] = interior_density(*model, grid.points[i]); });
  const auto norms = derivative_norms(
      params, grid, [](const Model& m, const Eigen::VectorXd& w) { return std::vector<double>{interior_density(m, w)}; },
      options);
  out.derivative.resize(norms.size());
  for (std::size_t i = 0; i < norms.size(); ++i) out.derivative[i] = norms[i][0];
  return out;
}

CheckEntry make_entry(std::string name, const Grid& grid, const std::vector<double>& ratios) {
  CheckEntry e;
  e.name = std::move(name);
  e.grid_size = static_cast<int>(grid.points.size());
  const Worst w = indexed_max(ratios);
  e.worst_ratio = w.ratio;
  e.pass = w.ratio <= 1.0 + kRatioTolerance;
  e.witness = as_vector(grid.points[w.index]);
  e.details["min_coordinate"] = grid.min_coordinate;
  e.details["per_axis"] = grid.per_axis;
  return e;
}

CheckEntry tolerance_entry(std::string name, double worst_error, double tol, std::vector<double> witness) {
  CheckEntry e;
  e.name = std::move(name);
  e.worst_ratio = std::isnan(worst_error) ? kInf : worst_error / tol;
  e.pass = e.worst_ratio <= 1.0 + kRatioTolerance;
  e.witness = std::move(witness);
  e.details["tolerance"] = tol;
  e.details["worst_error"] = json_number(worst_error);
  return e;
}

bool closed_form(const Model& m) { return m.id() == ModelId::logistic || m.id() == ModelId::huesler_reiss; }

std::vector<Eigen::VectorXd> structure_points(int k) {
  std::vector<Eigen::VectorXd> pts(3, Eigen::VectorXd(k));
  for (int i = 0; i < k; ++i) {
    pts[0](i) = 0.5 + 0.7 * i;
    pts[1](i) = 2.0 / (1.0 + i);
    pts[2](i) = std::exp(std::sin(i + 1.0));
  }
  return pts;
}

}  // namespace

Grid sphere_grid(int dim, int per_axis, double min_coordinate) {
  require(dim >= 1 && per_axis >= 1, ErrorCode::InvalidArgument, "grid needs positive dimension and size");
  require(min_coordinate > 0.0 && min_coordinate < 1.0, ErrorCode::InvalidArgument, "min coordinate must be in (0, 1)");
  Grid g;
  g.kind = Grid::Kind::sphere;
  g.per_axis = per_axis;
  g.min_coordinate = min_coordinate;
  if (dim == 1) {
    g.points.push_back(Eigen::VectorXd::Ones(1));
    return g;
  }
  const std::vector<double> axis = log_spaced(min_coordinate, 1.0, per_axis);
  for (int face = 0; face < dim; ++face) {
    tensor(axis, dim - 1, [&](const std::vector<double>& v) {
      Eigen::VectorXd z(dim);
      for (int i = 0, r = 0; i < dim; ++i) z(i) = i == face ? 1.0 : v[static_cast<std::size_t>(r++)];
      g.points.push_back(z);
    });
  }
  return g;
}

Grid simplex_grid(int dim, int per_axis, double min_coordinate) {
  require(dim >= 2 && per_axis >= 2, ErrorCode::InvalidArgument, "simplex grid needs dimension >= 2 and size >= 2");
  require(min_coordinate > 0.0 && min_coordinate < 1.0 / dim, ErrorCode::InvalidArgument,
          "min coordinate too large for the simplex");
  Grid g;
  g.kind = Grid::Kind::simplex;
  g.per_axis = per_axis;
  g.min_coordinate = min_coordinate;
  const int half = (per_axis + 1) / 2;
  std::vector<double> axis = log_spaced(min_coordinate, 0.5, half);
  for (int j = per_axis - half - 1; j >= 0; --j) axis.push_back(1.0 - axis[static_cast<std::size_t>(j)]);
  std::sort(axis.begin(), axis.end());
  axis.erase(std::unique(axis.begin(), axis.end()), axis.end());
  tensor(axis, dim - 1, [&](const std::vector<double>& v) {
    double rest = 1.0;
    for (double x : v) rest -= x;
    if (rest < min_coordinate) return;
    Eigen::VectorXd w(dim);
    for (int i = 0; i < dim - 1; ++i) w(i) = v[static_cast<std::size_t>(i)];
    w(dim - 1) = rest;
    g.points.push_back(w);
  });
  return g;
}

int refined_per_axis(int per_axis, int dim, double factor) {
  if (dim <= 1) return per_axis;
  return static_cast<int>(std::lround(per_axis * std::pow(factor, 1.0 / (dim - 1))));
}

B3Envelope default_b3_exponents(const ParamVector& params) {
  B3Envelope e;
  const int k = params.dim();
  switch (params.model()) {
    case ModelId::dirichlet: e.beta_minus = params.alpha(); break;
    case ModelId::extremal_t: e.beta_minus = Eigen::VectorXd::Constant(k, 1.0 / params.nu()); break;
    default: fail(ErrorCode::UnsupportedModel, "B3 is audited for the dirichlet and extremal-t families");
  }
  e.epsilon = 0.45 / e.beta_minus.sum();
  e.beta_plus = e.beta_minus / (1.0 + 0.5 * e.epsilon);
  return e;
}

bool RegularityReport::all_pass() const {
  return std::all_of(checks.begin(), checks.end(), [](const CheckEntry& c) { return c.pass; });
}

CheckEntry check_a3(const ParamVector& params, const A3Envelope& envelope, const Grid& grid,
                    const RegularityOptions& options) {
  check_alpha(envelope.alpha);
  require(envelope.a > 0.0, ErrorCode::OutOfDomain, "A3 constant must be positive");
  const std::vector<double> num = a3_numerators(params, grid, options);
  std::vector<double> ratios(num.size());
  for (std::size_t i = 0; i < num.size(); ++i) ratios[i] = num[i] / (envelope.a * a3_weight(grid.points[i], envelope.alpha));
  CheckEntry e = make_entry("A3", grid, ratios);
  e.details["A"] = envelope.a;
  e.details["alpha"] = envelope.alpha;
  e.details["norm"] = "inf";
  return e;
}

std::vector<CheckEntry> check_b3(const ParamVector& params, const B3Envelope& envelope, const Grid& grid,
                                 const RegularityOptions& options) {
  check_b3_exponents(envelope, params.dim());
  require(envelope.b_minus >= 0.0 && envelope.b_plus >= 0.0, ErrorCode::OutOfDomain, "B3 constants must be >= 0");
  const B3Pieces p = b3_pieces(params, grid, options);
  std::vector<double> lower(p.density.size()), upper(p.density.size());
  for (std::size_t i = 0; i < p.density.size(); ++i) {
    const Eigen::VectorXd& w = grid.points[i];
    lower[i] = envelope.b_minus * std::exp(product_weight(w, envelope.beta_minus)) / p.density[i];
    upper[i] = p.derivative[i] / (envelope.b_plus * std::exp(product_weight(w, envelope.beta_plus)));
  }
  std::vector<CheckEntry> out = {make_entry("B3_lower", grid, lower), make_entry("B3_upper", grid, upper)};
  for (auto& e : out) {
    e.details["B_minus"] = envelope.b_minus;
    e.details["B_plus"] = envelope.b_plus;
    e.details["beta_minus"] = as_vector(envelope.beta_minus);
    e.details["beta_plus"] = as_vector(envelope.beta_plus);
    e.details["epsilon"] = envelope.epsilon;
  }
  return out;
}

A3Envelope fit_a3_envelope(const ParamVector& params, double alpha, const Grid& grid, const RegularityOptions& options) {
  check_alpha(alpha);
  const std::vector<double> num = a3_numerators(params, grid, options);
  std::vector<double> ratios(num.size());
  for (std::size_t i = 0; i < num.size(); ++i) ratios[i] = num[i] / a3_weight(grid.points[i], alpha);
  const Worst w = indexed_max(ratios);
  if (!std::isfinite(w.ratio)) {
    fail(ErrorCode::Infeasible, "A3 ratio is unbounded on the grid at " + nlohmann::json(as_vector(grid.points[w.index])).dump());
  }
  return {std::max(w.ratio, std::numeric_limits<double>::min()), alpha};
}

B3Envelope fit_b3_envelope(const ParamVector& params, const B3Envelope& exponents, const Grid& grid,
                           const RegularityOptions& options) {
  check_b3_exponents(exponents, params.dim());
  const B3Pieces p = b3_pieces(params, grid, options);
  std::vector<double> inv_lower(p.density.size()), upper(p.density.size());
  for (std::size_t i = 0; i < p.density.size(); ++i) {
    const Eigen::VectorXd& w = grid.points[i];
    inv_lower[i] = std::exp(product_weight(w, exponents.beta_minus)) / p.density[i];
    upper[i] = p.derivative[i] / std::exp(product_weight(w, exponents.beta_plus));
  }
  const Worst lo = indexed_max(inv_lower);
  const Worst hi = indexed_max(upper);
  if (!std::isfinite(lo.ratio) || lo.ratio <= 0.0) {
    fail(ErrorCode::Infeasible,
         "B3 lower envelope is degenerate on the grid at " + nlohmann::json(as_vector(grid.points[lo.index])).dump());
  }
  if (!std::isfinite(hi.ratio)) {
    fail(ErrorCode::Infeasible,
         "B3 derivative ratio is unbounded on the grid at " + nlohmann::json(as_vector(grid.points[hi.index])).dump());
  }
  B3Envelope out = exponents;
  out.b_minus = 1.0 / lo.ratio;
  out.b_plus = std::max(hi.ratio, std::numeric_limits<double>::min());
  return out;
}

RegularityReport audit_a3(const ParamVector& params, double alpha, const AuditOptions& options) {
  const int k = params.dim();
  const Grid coarse = sphere_grid(k, options.per_axis);
  A3Envelope env = fit_a3_envelope(params, alpha, coarse, options.regularity);
  CheckEntry fitted = check_a3(params, env, coarse, options.regularity);
  fitted.name = "A3_fit";
  env.a *= options.margin;
  const Grid fine = sphere_grid(k, refined_per_axis(options.per_axis, k, options.refine_factor));
  CheckEntry verified = check_a3(params, env, fine, options.regularity);
  verified.name = "A3_verify";
  verified.details["margin"] = options.margin;
  RegularityReport r;
  r.model = params.model();
  r.params = params.natural();
  r.a3 = env;
  r.checks = {fitted, verified};
  return r;
}

RegularityReport audit_b3(const ParamVector& params, const std::optional<B3Envelope>& exponents,
                          const AuditOptions& options) {
  const int k = params.dim();
  const B3Envelope start = exponents ? *exponents : default_b3_exponents(params);
  const Grid coarse = simplex_grid(k, options.per_axis);
  B3Envelope env = fit_b3_envelope(params, start, coarse, options.regularity);
  std::vector<CheckEntry> fitted = check_b3(params, env, coarse, options.regularity);
  env.b_minus /= options.margin;
  env.b_plus *= options.margin;
  const Grid fine = simplex_grid(k, refined_per_axis(options.per_axis, k, options.refine_factor));
  std::vector<CheckEntry> verified = check_b3(params, env, fine, options.regularity);
  RegularityReport r;
  r.model = params.model();
  r.params = params.natural();
  r.b3 = env;
  for (auto& e : fitted) {
    e.name += "_fit";
    r.checks.push_back(e);
  }
  for (auto& e : verified) {
    e.name += "_verify";
    e.details["margin"] = options.margin;
    r.checks.push_back(e);
  }
  return r;
}

RegularityReport check_structure(const Model& model, const StructureOptions& options) {
  const int k = model.dim();
  RegularityReport r;
  r.model = model.id();
  r.params = model.params().natural();
  const auto pts = structure_points(k);
  auto span_of = [](const Eigen::VectorXd& v) { return std::span<const double>{v.data(), static_cast<std::size_t>(v.size())}; };

  {
    const double tol = closed_form(model) ? options.homogeneity_closed_form_tol : options.homogeneity_quadrature_tol;
    double worst = 0.0;
    std::vector<double> witness;
    for (const auto& z : pts) {
      const double v = model.exponent(span_of(z));
      for (double t : {0.5, 2.0, 10.0}) {
        const Eigen::VectorXd tz = t * z;
        const double err = std::abs(t * model.exponent(span_of(tz)) - v) / v;
        if (!(err <= worst)) {
          worst = err;
          witness = as_vector(tz);
        }
      }
    }
    if (witness.empty()) witness = as_vector(pts[0]);
    r.checks.push_back(tolerance_entry("homogeneity", worst, tol, witness));
  }
  {
    double worst = 0.0;
    std::vector<double> witness;
    for (int i = 0; i < k; ++i) {
      Eigen::VectorXd z = Eigen::VectorXd::Constant(k, kInf);
      z(i) = 1.0;
      const double err = std::abs(model.exponent(span_of(z)) - 1.0);
      if (!(err <= worst) || witness.empty()) {
        worst = std::max(worst, std::isnan(err) ? kInf : err);
        witness = as_vector(z);
      }
    }
    r.checks.push_back(tolerance_entry("normalization", worst, options.normalization_tol, witness));
  }
  if (model.has_angular_density() && k <= kMaxQuadratureModelDim && k >= 2) {
    double worst = 0.0;
    std::vector<double> witness(static_cast<std::size_t>(k), 0.0);
    for (int i = 0; i < k; ++i) {
      const double m = angular_integral(model, [i](std::span<const double> w) { return w[static_cast<std::size_t>(i)]; });
      const double err = std::abs(m - 1.0 / k);
      if (!(err <= worst)) {
        worst = err;
        std::fill(witness.begin(), witness.end(), 0.0);
        witness[static_cast<std::size_t>(i)] = 1.0;
      }
    }
    r.checks.push_back(tolerance_entry("angular_moment", worst, options.moment_tol, witness));

    // lambda on the open full face against -d^k V / dz_1..dz_k
    std::unique_ptr<Model> tight;
    if (!model.has_block_derivatives() && k == 2) {
      ModelOptions o = model.options();
      o.quadrature_rel_tol = 1e-12;
      tight = make_model(model.params(), o);
    }
    if (model.has_block_derivatives() || tight) {
      double worst_rel = 0.0;
      std::vector<double> w_at = as_vector(pts[0]);
      for (const auto& z : pts) {
        const double lam = model.exponent_measure_density(span_of(z), full_set(k));
        double ref;
        if (model.has_block_derivatives()) {
          ref = model.block_derivative(span_of(z), full_set(k));
        } else {
          const double a = 1e-3 * z(0), b = 1e-3 * z(1);
          auto v = [&](double x, double y) {
            const double p[2] = {x, y};
            return tight->exponent(p);
          };
          ref = -(v(z(0) + a, z(1) + b) - v(z(0) + a, z(1) - b) - v(z(0) - a, z(1) + b) + v(z(0) - a, z(1) - b)) /
                (4.0 * a * b);
        }
        const double err = std::abs(lam - ref) / std::abs(ref);
        if (!(err <= worst_rel)) {
          worst_rel = err;
          w_at = as_vector(z);
        }
      }
      r.checks.push_back(tolerance_entry("exponent_measure_density", worst_rel, options.density_tol, w_at));
    }
  }
  return r;
}

RegularityReport check_structure(const ParamVector& params, const StructureOptions& options) {
  return check_structure(*make_model(params), options);
}

nlohmann::json to_json(const RegularityReport& report) {
  nlohmann::json j;
  j["model"] = std::string(to_string(report.model));
  j["params"] = json_array(as_vector(report.params));
  j["norm"] = "inf";
  j["all_pass"] = report.all_pass();
  j["statement"] = report.all_pass() ? "consistent with the audited conditions on the reported grids"
                                     : "not consistent with the audited conditions on the reported grids";
  nlohmann::json checks = nlohmann::json::array();
  for (const auto& c : report.checks) {
    nlohmann::json e;
    e["name"] = c.name;
    e["grid_size"] = c.grid_size;
    e["worst_ratio"] = json_number(c.worst_ratio);
    e["pass"] = c.pass;
    e["witness"] = json_array(c.witness);
    e["constants"] = c.details;
    checks.push_back(e);
  }
  j["checks"] = checks;
  if (report.a3) j["envelope"] = {{"kind", "A3"}, {"A", report.a3->a}, {"alpha", report.a3->alpha}};
  if (report.b3) {
    j["envelope"] = {{"kind", "B3"},
                     {"B_minus", report.b3->b_minus},
                     {"B_plus", report.b3->b_plus},
                     {"beta_minus", as_vector(report.b3->beta_minus)},
                     {"beta_plus", as_vector(report.b3->beta_plus)},
                     {"epsilon", report.b3->epsilon}};
  }
  return j;
}

ParamVector params_from_natural(ModelId model, int dim, const Eigen::VectorXd& natural) {
  require(natural.size() == param_count(model, dim), ErrorCode::ShapeMismatch,
          "natural parameter vector has the wrong length");
  switch (model) {
    case ModelId::logistic: return ParamVector::logistic(dim, natural(0));
    case ModelId::dirichlet: return ParamVector::dirichlet(natural);
    case ModelId::huesler_reiss:
    case ModelId::extremal_t: {
      Eigen::MatrixXd m = Eigen::MatrixXd::Identity(dim, dim);
      if (model == ModelId::huesler_reiss) m.setZero();
      int idx = 0;
      for (int i = 0; i < dim; ++i)
        for (int j = i + 1; j < dim; ++j) m(i, j) = m(j, i) = natural(idx++);
      if (model == ModelId::huesler_reiss) return ParamVector::huesler_reiss(m);
      return ParamVector::extremal_t(m, natural(idx));
    }
  }
  fail(ErrorCode::UnsupportedModel, "unknown model");
}

}  // namespace maxstab
