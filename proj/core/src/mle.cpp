#include "maxstab/mle.hpp"

#include <cmath>
#include <limits>

#include <boost/math/distributions/normal.hpp>

#include "maxstab/error.hpp"
#include "maxstab/linalg.hpp"
#include "maxstab/simulate.hpp"
#include "maxstab/summation.hpp"

namespace maxstab {

namespace {

std::vector<double> terms_at(const Parameterization& chart, const Eigen::VectorXd& u, const Dataset& data,
                             const ModelOptions& options, int threads) {
  const auto model = make_model(chart.to_params(u), options);
  return log_density_terms(*model, data, threads);
}

// n x D matrix of per-row central-difference scores.
Eigen::MatrixXd row_scores(const Parameterization& chart, const Eigen::VectorXd& u, const Dataset& data,
                           const ModelOptions& options, int threads) {
  const auto d = u.size();
  Eigen::MatrixXd out(data.size(), d);
  for (Eigen::Index a = 0; a < d; ++a) {
    const double h = default_step(u(a));
    Eigen::VectorXd up = u, down = u;
    up(a) += h;
    down(a) -= h;
    const std::vector<double> fp = terms_at(chart, up, data, options, threads);
    const std::vector<double> fm = terms_at(chart, down, data, options, threads);
    for (int i = 0; i < data.size(); ++i) {
      const auto iu = static_cast<std::size_t>(i);
      out(i, a) = (fp[iu] - fm[iu]) / (up(a) - down(a));
      require(std::isfinite(out(i, a)), ErrorCode::NonFinite, "score is not finite");
    }
  }
  return out;
}

// Mean outer product of score rows plus per-entry standard errors.
FisherResult outer_product(const Eigen::MatrixXd& scores) {
  const auto n = scores.rows();
  const auto d = scores.cols();
  FisherResult out;
  out.n = static_cast<int>(n);
  out.info.resize(d, d);
  out.standard_errors.resize(d, d);
  std::vector<double> prod(static_cast<std::size_t>(n)), sq(static_cast<std::size_t>(n));
  for (Eigen::Index a = 0; a < d; ++a) {
    for (Eigen::Index b = a; b < d; ++b) {
      for (Eigen::Index i = 0; i < n; ++i) prod[static_cast<std::size_t>(i)] = scores(i, a) * scores(i, b);
      const double mean = exact_sum(prod) / static_cast<double>(n);
      for (Eigen::Index i = 0; i < n; ++i) {
        const double diff = prod[static_cast<std::size_t>(i)] - mean;
        sq[static_cast<std::size_t>(i)] = diff * diff;
      }
      const double var = n > 1 ? exact_sum(sq) / static_cast<double>(n - 1) : 0.0;
      out.info(a, b) = out.info(b, a) = mean;
      out.standard_errors(a, b) = out.standard_errors(b, a) = std::sqrt(var / static_cast<double>(n));
    }
  }
  return out;
}

double logit(double p) { return std::log(p / (1.0 - p)); }
double expit(double x) { return 1.0 / (1.0 + std::exp(-x)); }

}  // namespace

Parameterization model_parameterization(ModelId model, int dim) {
  require(model != ModelId::extremal_t, ErrorCode::UnsupportedModel,
          "maximum likelihood is not available for the extremal-t family");
  require(model != ModelId::dirichlet || dim <= kMaxQuadratureModelDim, ErrorCode::UnsupportedModel,
          "dirichlet fits support dimension <= 3");
  Parameterization p;
  p.dim = param_count(model, dim);
  p.to_params = [model, dim](const Eigen::VectorXd& u) { return from_unconstrained(model, dim, u); };
  p.natural = [model, dim](const Eigen::VectorXd& u) { return from_unconstrained(model, dim, u).natural(); };
  p.names = default_init(model, dim).natural_names();
  p.coordinatewise = model != ModelId::huesler_reiss || dim == 2;
  return p;
}

Parameterization brown_resnick_parameterization(const Eigen::MatrixXd& locations) {
  Parameterization p;
  p.dim = 2;
  auto config = [locations](const Eigen::VectorXd& u) {
    SpatialConfig c;
    c.locations = locations;
    c.family = SpatialFamily::brown_resnick_variogram;
    c.scale = std::exp(u(0));
    c.alpha = 2.0 * expit(u(1));
    return c;
  };
  // validates the locations once up front
  map_spatial_params(config(brown_resnick_unconstrained(1.0, 1.0)));
  p.to_params = [config](const Eigen::VectorXd& u) { return map_spatial_params(config(u)); };
  p.natural = [config](const Eigen::VectorXd& u) {
    const SpatialConfig c = config(u);
    return Eigen::Vector2d(c.scale, c.alpha).eval();
  };
  p.names = {"scale", "alpha"};
  p.coordinatewise = true;
  return p;
}

Eigen::VectorXd brown_resnick_unconstrained(double scale, double alpha) {
  require(scale > 0.0 && alpha > 0.0 && alpha < 2.0, ErrorCode::OutOfDomain,
          "Brown-Resnick scale must be positive and alpha in (0, 2)");
  return Eigen::Vector2d(std::log(scale), logit(alpha / 2.0));
}

ParamVector default_init(ModelId model, int dim) {
  switch (model) {
    case ModelId::logistic:
      return ParamVector::logistic(dim, 0.7);
    case ModelId::dirichlet:
      return ParamVector::dirichlet(Eigen::VectorXd::Ones(dim));
    case ModelId::huesler_reiss: {
      Eigen::MatrixXd l2 = Eigen::MatrixXd::Constant(dim, dim, 0.5);
      l2.diagonal().setZero();
      return ParamVector::huesler_reiss(l2);
    }
    case ModelId::extremal_t: {
      Eigen::MatrixXd s = Eigen::MatrixXd::Constant(dim, dim, 0.5);
      s.diagonal().setOnes();
      return ParamVector::extremal_t(s, 2.0);
    }
  }
  fail(ErrorCode::UnsupportedModel, "unknown model");
}

void require_nonsingular(const Eigen::MatrixXd& info) {
  require(info.allFinite(), ErrorCode::Singular, "information matrix has non-finite entries");
  require(min_eigenvalue(info) >= kSingularThreshold, ErrorCode::Singular,
          "information matrix is numerically singular");
}

std::pair<double, double> unconstrained_interval(double estimate, double standard_error, double level) {
  require(level > 0.0 && level < 1.0, ErrorCode::OutOfDomain, "level must lie in (0, 1)");
  const double z = boost::math::quantile(boost::math::normal(), 0.5 * (1.0 + level));
  return {estimate - z * standard_error, estimate + z * standard_error};
}

std::vector<WaldInterval> wald_interval(const FitResult& fit, double level, InfoSource source) {
  const Eigen::MatrixXd& info = source == InfoSource::observed ? fit.observed_info : fit.opg_info;
  require_nonsingular(info);
  require(fit.n > 0, ErrorCode::EmptyData, "fit has no observations");
  const Eigen::MatrixXd cov = info.inverse() / static_cast<double>(fit.n);
  const auto d = fit.u_hat.size();
  std::vector<WaldInterval> out(static_cast<std::size_t>(fit.natural_hat.size()));
  if (fit.chart.coordinatewise) {
    for (Eigen::Index i = 0; i < d; ++i) {
      const auto [lo, hi] = unconstrained_interval(fit.u_hat(i), std::sqrt(cov(i, i)), level);
      Eigen::VectorXd u_lo = fit.u_hat, u_hi = fit.u_hat;
      u_lo(i) = lo;
      u_hi(i) = hi;
      auto& w = out[static_cast<std::size_t>(i)];
      w.estimate = fit.natural_hat(i);
      w.lower = fit.chart.natural(u_lo)(i);
      w.upper = fit.chart.natural(u_hi)(i);
    }
  } else {
    const Eigen::MatrixXd jac = finite_diff_jacobian(fit.chart.natural, fit.u_hat);
    const Eigen::MatrixXd ncov = jac * cov * jac.transpose();
    for (Eigen::Index i = 0; i < fit.natural_hat.size(); ++i) {
      const auto [lo, hi] = unconstrained_interval(fit.natural_hat(i), std::sqrt(ncov(i, i)), level);
      auto& w = out[static_cast<std::size_t>(i)];
      w.estimate = fit.natural_hat(i);
      w.lower = lo;
      w.upper = hi;
    }
  }
  for (std::size_t i = 0; i < out.size(); ++i) out[i].name = fit.chart.names[i];
  return out;
}

FitResult fit(const Parameterization& chart, const Dataset& data, const Eigen::VectorXd& init_u,
              const FitOptions& options) {
  require(data.size() > 0, ErrorCode::EmptyData, "cannot fit an empty dataset");
  require(init_u.size() == chart.dim, ErrorCode::ShapeMismatch, "initial point has the wrong dimension");
  require(options.starts >= 1, ErrorCode::InvalidArgument, "at least one start is required");
  const double n = static_cast<double>(data.size());
  const ScalarField objective = [&](const Eigen::VectorXd& u) {
    const std::vector<double> terms = terms_at(chart, u, data, options.model, options.threads);
    return -exact_sum(terms) / n;
  };

  std::vector<StartOutcome> starts(static_cast<std::size_t>(options.starts));
  for (int s = 0; s < options.starts; ++s) {
    StartOutcome& out = starts[static_cast<std::size_t>(s)];
    out.init_u = init_u;
    if (s > 0) {
      RngStream rng(options.start_seed, static_cast<std::uint64_t>(s));
      for (Eigen::Index a = 0; a < init_u.size(); ++a) out.init_u(a) += options.start_spread * rng.standard_normal();
    }
    try {
      const MinimizeResult nm = nelder_mead(objective, out.init_u, options.nelder_mead);
      const MinimizeResult qn = bfgs(objective, nm.x, options.bfgs);
      out.u_hat = qn.x;
      out.loglik = -qn.value * n;
      out.converged = qn.converged;
      out.n_iter = nm.iterations + qn.iterations;
      out.gradient_norm = qn.gradient.norm();
    } catch (const Error& e) {
      out.error = e.what();
      out.loglik = -std::numeric_limits<double>::infinity();
    }
  }

  int best = -1;
  for (int s = 0; s < options.starts; ++s) {
    const StartOutcome& c = starts[static_cast<std::size_t>(s)];
    if (!c.error.empty()) continue;
    if (best < 0) {
      best = s;
      continue;
    }
    const StartOutcome& b = starts[static_cast<std::size_t>(best)];
    if ((c.converged && !b.converged) || (c.converged == b.converged && c.loglik > b.loglik)) best = s;
  }
  require(best >= 0, ErrorCode::NoImprovement, "no start produced a finite log-likelihood");
  const StartOutcome& b = starts[static_cast<std::size_t>(best)];
  if (options.require_convergence)
    require(b.converged, ErrorCode::MaxIterations, "optimizer did not converge from any start");

  FitResult r(chart.to_params(b.u_hat));
  r.chart = chart;
  r.u_hat = b.u_hat;
  r.natural_hat = chart.natural(b.u_hat);
  r.loglik = exact_sum(terms_at(chart, b.u_hat, data, options.model, options.threads));
  r.converged = b.converged;
  r.n_iter = b.n_iter;
  r.gradient_norm = b.gradient_norm;
  r.n = data.size();
  r.level = options.level;
  for (const StartOutcome& c : starts) {
    if (c.converged && b.converged && std::abs(c.loglik - b.loglik) > 1e-6) r.starts_disagree = true;
  }
  r.starts = std::move(starts);

  r.observed_info = fisher_observed(chart, r.u_hat, data, options.hessian_step, options.threads, options.model).info;
  r.opg_info = outer_product(row_scores(chart, r.u_hat, data, options.model, options.threads)).info;
  try {
    r.wald_intervals = wald_interval(r, options.level, options.wald_info);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::Singular) throw;
    r.info_singular = true;
  }
  return r;
}

FitResult fit(const Dataset& data, const ParamVector& init, const FitOptions& options) {
  require(data.dim() == init.dim(), ErrorCode::ShapeMismatch, "initial parameters do not match the data dimension");
  return fit(model_parameterization(init.model(), init.dim()), data, to_unconstrained(init), options);
}

FisherResult fisher_opg(const ParamVector& params, int n_draws, std::uint64_t seed, int threads, ScoreMethod method,
                        const ModelOptions& options) {
  require(n_draws >= 2, ErrorCode::InvalidArgument, "at least two draws are required");
  const auto model = make_model(params, options);
  const Dataset draws = simulate(*model, n_draws, seed, threads);
  if (method == ScoreMethod::analytic) {
    LikelihoodOptions lo;
    lo.model = options;
    lo.threads = threads;
    return outer_product(score_matrix(params, draws, method, lo));
  }
  const Parameterization chart = model_parameterization(params.model(), params.dim());
  return outer_product(row_scores(chart, to_unconstrained(params), draws, options, threads));
}

FisherResult fisher_observed(const Parameterization& chart, const Eigen::VectorXd& u, const Dataset& data, double h,
                             int threads, const ModelOptions& options) {
  require(data.size() > 0, ErrorCode::EmptyData, "observed information needs data");
  require(h > 0.0, ErrorCode::InvalidArgument, "step must be positive");
  const auto d = u.size();
  const auto n = static_cast<std::size_t>(data.size());
  auto at = [&](Eigen::Index a, double da, Eigen::Index b, double db) {
    Eigen::VectorXd v = u;
    if (a >= 0) v(a) += da;
    if (b >= 0) v(b) += db;
    return terms_at(chart, v, data, options, threads);
  };
  const std::vector<double> center = at(-1, 0.0, -1, 0.0);
  // per-row Hessians, one vector of n values per (a, b) entry
  std::vector<std::vector<double>> entry(static_cast<std::size_t>(d * d));
  for (Eigen::Index a = 0; a < d; ++a) {
    const auto fp = at(a, h, -1, 0.0), fm = at(a, -h, -1, 0.0);
    auto& e = entry[static_cast<std::size_t>(a * d + a)];
    e.resize(n);
    for (std::size_t i = 0; i < n; ++i) e[i] = (fp[i] - 2.0 * center[i] + fm[i]) / (h * h);
    for (Eigen::Index b = a + 1; b < d; ++b) {
      const auto pp = at(a, h, b, h), pm = at(a, h, b, -h), mp = at(a, -h, b, h), mm = at(a, -h, b, -h);
      auto& o = entry[static_cast<std::size_t>(a * d + b)];
      o.resize(n);
      for (std::size_t i = 0; i < n; ++i) o[i] = (pp[i] - pm[i] - mp[i] + mm[i]) / (4.0 * h * h);
    }
  }
  FisherResult out;
  out.n = data.size();
  out.info.resize(d, d);
  out.standard_errors.resize(d, d);
  std::vector<double> sq(n);
  for (Eigen::Index a = 0; a < d; ++a) {
    for (Eigen::Index b = a; b < d; ++b) {
      const auto& e = entry[static_cast<std::size_t>(a * d + b)];
      const double mean = exact_sum(e) / static_cast<double>(n);
      for (std::size_t i = 0; i < n; ++i) sq[i] = (e[i] - mean) * (e[i] - mean);
      const double var = n > 1 ? exact_sum(sq) / static_cast<double>(n - 1) : 0.0;
      out.info(a, b) = out.info(b, a) = -mean;
      out.standard_errors(a, b) = out.standard_errors(b, a) = std::sqrt(var / static_cast<double>(n));
    }
  }
  return out;
}

FisherResult fisher_information(const ParamVector& params, FisherMethod method, int n_draws, std::uint64_t seed,
                                const Dataset* data, int threads, const ModelOptions& options) {
  FisherResult r;
  if (method == FisherMethod::opg_monte_carlo) {
    r = fisher_opg(params, n_draws, seed, threads, ScoreMethod::finite_diff, options);
  } else {
    require(data != nullptr, ErrorCode::EmptyData, "observed information needs data");
    r = fisher_observed(model_parameterization(params.model(), params.dim()), to_unconstrained(params), *data, 1e-4,
                        threads, options);
  }
  require_nonsingular(r.info);
  return r;
}

}  // namespace maxstab
