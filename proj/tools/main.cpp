#include <CLI11.hpp>

#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <nlohmann/json.hpp>

#include "maxstab/error.hpp"
#include "maxstab/io.hpp"
#include "maxstab/likelihood.hpp"
#include "maxstab/mle.hpp"
#include "maxstab/regularity.hpp"
#include "maxstab/simulate.hpp"
#include "maxstab/study.hpp"

using namespace maxstab;
using nlohmann::json;

namespace {

constexpr int kExitDomain = 1;
constexpr int kExitUsage = 2;

struct Flags {
  std::string model;
  std::string params;
  std::string data;
  std::string out;
  std::string csv;
  std::optional<int> n;
  std::optional<std::uint64_t> seed;
  std::optional<int> starts;
  int threads = 0;
  std::optional<double> level;
  std::optional<double> alpha;
  bool structure = false;
};

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

void error_line(std::string_view code, const std::string& message) {
  const json e = {{"error", code}, {"message", message}};
  std::cerr << e.dump() << '\n';
}

void emit(const Flags& f, const std::string& text) {
  if (f.out.empty()) {
    std::cout << text;
    std::cout.flush();
  } else {
    write_text_file(f.out, text);
  }
}

std::optional<ModelId> model_flag(const Flags& f) {
  if (f.model.empty()) return std::nullopt;
  return parse_model_id(f.model);
}

ParamVector load_params(const Flags& f) {
  if (f.params.empty()) throw UsageError("--params is required");
  const json j = read_json_file(f.params);
  if (!j.contains("model") && f.model.empty()) throw UsageError("--model is required when the parameter file has none");
  return params_from_json(j, model_flag(f));
}

Dataset load_data(const Flags& f) {
  if (f.data.empty()) throw UsageError("--data is required");
  return read_csv_file(f.data);
}

json fit_to_json(const FitResult& r) {
  json j;
  j["model"] = std::string(to_string(r.theta_hat.model()));
  j["params"] = params_to_json(r.theta_hat);
  j["names"] = r.chart.names;
  j["estimate"] = json_vector(r.natural_hat);
  j["unconstrained"] = json_vector(r.u_hat);
  j["loglik"] = json_number(r.loglik);
  j["converged"] = r.converged;
  j["n_iter"] = r.n_iter;
  j["gradient_norm"] = json_number(r.gradient_norm);
  j["n"] = r.n;
  j["level"] = r.level;
  j["observed_info"] = json_matrix(r.observed_info);
  j["opg_info"] = json_matrix(r.opg_info);
  j["info_singular"] = r.info_singular;
  json intervals = json::array();
  for (const auto& w : r.wald_intervals) {
    intervals.push_back({{"name", w.name},
                         {"estimate", json_number(w.estimate)},
                         {"lower", json_number(w.lower)},
                         {"upper", json_number(w.upper)}});
  }
  j["wald_intervals"] = std::move(intervals);
  json starts = json::array();
  for (const auto& s : r.starts) {
    json e = {{"init", json_vector(s.init_u)},
              {"unconstrained", json_vector(s.u_hat)},
              {"loglik", json_number(s.loglik)},
              {"converged", s.converged},
              {"n_iter", s.n_iter},
              {"gradient_norm", json_number(s.gradient_norm)}};
    if (!s.error.empty()) e["error"] = s.error;
    starts.push_back(std::move(e));
  }
  j["starts"] = std::move(starts);
  j["starts_disagree"] = r.starts_disagree;
  return j;
}

int run_density(const Flags& f) {
  const ParamVector p = load_params(f);
  const Dataset data = load_data(f);
  const auto model = make_model(p);
  const std::vector<double> terms = log_density_terms(*model, data, f.threads);
  std::string out = "log_density\n";
  for (double t : terms) out += format_double(t) + "\n";
  emit(f, out);
  return 0;
}

int run_loglik(const Flags& f) {
  const ParamVector p = load_params(f);
  const Dataset data = load_data(f);
  const double ll = log_likelihood(*make_model(p), data, f.threads);
  const json j = {{"model", std::string(to_string(p.model()))}, {"n", data.size()}, {"loglik", ll}};
  emit(f, dump_json(j) + "\n");
  return 0;
}

int run_fit(const Flags& f) {
  const Dataset data = load_data(f);
  const ParamVector init = [&] {
    if (!f.params.empty()) return load_params(f);
    const auto model = model_flag(f);
    if (!model) throw UsageError("fit needs --model or --params");
    return default_init(*model, data.dim());
  }();
  FitOptions options;
  options.threads = f.threads;
  if (f.level) options.level = *f.level;
  if (f.starts) options.starts = *f.starts;
  const FitResult r = fit(data, init, options);
  emit(f, dump_json(fit_to_json(r)) + "\n");
  return 0;
}

int run_simulate(const Flags& f) {
  const ParamVector p = load_params(f);
  if (!f.n) throw UsageError("--n is required");
  const Dataset d = simulate(*make_model(p), *f.n, f.seed.value_or(1), f.threads);
  std::ostringstream out;
  write_csv(out, d);
  emit(f, out.str());
  return 0;
}

int run_fisher(const Flags& f) {
  const ParamVector p = load_params(f);
  std::optional<Dataset> data;
  if (!f.data.empty()) data = read_csv_file(f.data);
  const FisherMethod method = data ? FisherMethod::observed : FisherMethod::opg_monte_carlo;
  const FisherResult r =
      fisher_information(p, method, f.n.value_or(100000), f.seed.value_or(1), data ? &*data : nullptr, f.threads);
  const json j = {{"model", std::string(to_string(p.model()))},
                  {"params", params_to_json(p)},
                  {"method", data ? "observed" : "opg_monte_carlo"},
                  {"names", model_parameterization(p.model(), p.dim()).names},
                  {"n", r.n},
                  {"info", json_matrix(r.info)},
                  {"standard_errors", json_matrix(r.standard_errors)}};
  emit(f, dump_json(j) + "\n");
  return 0;
}

int run_study_command(const Flags& f) {
  if (f.params.empty()) throw UsageError("--params must name a study configuration");
  StudyConfig cfg = study_config_from_json(read_json_file(f.params));
  if (f.n) cfg.n = *f.n;
  if (f.seed) cfg.master_seed = *f.seed;
  if (f.level) cfg.ci_level = *f.level;
  const StudyResult r = run_study(cfg, f.threads);
  emit(f, summarize(r, ReportFormat::json));
  if (!f.csv.empty()) write_text_file(f.csv, summarize(r, ReportFormat::csv));
  return 0;
}

int run_check(const Flags& f) {
  const ParamVector p = load_params(f);
  RegularityReport report;
  if (f.structure) {
    report = check_structure(p);
  } else {
    AuditOptions options;
    options.regularity.threads = f.threads;
    if (f.n) options.per_axis = *f.n;
    if (p.model() == ModelId::logistic || p.model() == ModelId::huesler_reiss) {
      const double alpha = f.alpha.value_or(p.model() == ModelId::logistic ? 0.25 : 0.0);
      report = audit_a3(p, alpha, options);
    } else {
      report = audit_b3(p, std::nullopt, options);
    }
  }
  emit(f, dump_json(to_json(report)) + "\n");
  return report.all_pass() ? 0 : kExitDomain;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Full-likelihood inference for multivariate max-stable distributions", "maxstab"};
  app.require_subcommand(1, 1);
  Flags f;

  auto common = [&](CLI::App* sub) {
    sub->add_option("--model", f.model, "logistic | dirichlet | huesler_reiss | extremal_t");
    sub->add_option("--params", f.params, "parameter JSON file (study: configuration file)");
    sub->add_option("--out", f.out, "output file (default stdout)");
    sub->add_option("--threads", f.threads, "worker threads (default all cores)")->check(CLI::NonNegativeNumber);
  };
  auto data_flag = [&](CLI::App* sub) { sub->add_option("--data", f.data, "headered CSV, one observation per row"); };
  auto n_flag = [&](CLI::App* sub, const std::string& help) { sub->add_option("--n", f.n, help)->check(CLI::PositiveNumber); };
  auto seed_flag = [&](CLI::App* sub) { sub->add_option("--seed", f.seed, "master seed"); };
  auto level_flag = [&](CLI::App* sub) {
    sub->add_option("--level", f.level, "confidence level")->check(CLI::Range(0.0, 1.0));
  };

  CLI::App* density = app.add_subcommand("density", "log-density of every data row");
  common(density);
  data_flag(density);
  CLI::App* loglik = app.add_subcommand("loglik", "log-likelihood of a dataset");
  common(loglik);
  data_flag(loglik);
  CLI::App* fit_cmd = app.add_subcommand("fit", "maximum likelihood fit; --params gives the starting point");
  common(fit_cmd);
  data_flag(fit_cmd);
  level_flag(fit_cmd);
  fit_cmd->add_option("--starts", f.starts, "number of optimizer starts")->check(CLI::PositiveNumber);
  CLI::App* sim = app.add_subcommand("simulate", "exact simulation to CSV");
  common(sim);
  n_flag(sim, "number of observations");
  seed_flag(sim);
  CLI::App* fisher = app.add_subcommand("fisher", "Fisher information (observed when --data is given)");
  common(fisher);
  data_flag(fisher);
  n_flag(fisher, "Monte Carlo draws");
  seed_flag(fisher);
  CLI::App* study = app.add_subcommand("study", "Monte Carlo study of the MLE");
  common(study);
  n_flag(study, "sample size per replication");
  seed_flag(study);
  level_flag(study);
  study->add_option("--csv", f.csv, "per-replication CSV output");
  CLI::App* check = app.add_subcommand("check", "regularity audit report");
  common(check);
  n_flag(check, "grid points per axis");
  check->add_option("--alpha", f.alpha, "A3 envelope exponent");
  check->add_flag("--structure", f.structure, "structural identities instead of the envelope audit");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << app.help();
    error_line("UsageError", e.what());
    return kExitUsage;
  }

  try {
    if (*density) return run_density(f);
    if (*loglik) return run_loglik(f);
    if (*fit_cmd) return run_fit(f);
    if (*sim) return run_simulate(f);
    if (*fisher) return run_fisher(f);
    if (*study) return run_study_command(f);
    return run_check(f);
  } catch (const UsageError& e) {
    std::cerr << app.help();
    error_line("UsageError", e.what());
    return kExitUsage;
  } catch (const Error& e) {
    error_line(to_string(e.code()), e.what());
    return e.code() == ErrorCode::IoError ? kExitUsage : kExitDomain;
  } catch (const std::exception& e) {
    error_line("InternalError", e.what());
    return kExitDomain;
  }
}
