// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "maxstab/error.hpp"
#include "maxstab/io.hpp"
#include "maxstab/likelihood.hpp"
#include "maxstab/mle.hpp"
#include "maxstab/partitions.hpp"
#include "maxstab/regularity.hpp"
#include "maxstab/simulate.hpp"
#include "maxstab/spatial.hpp"
#include "maxstab/study.hpp"
#include "schema_check.hpp"

using namespace maxstab;

namespace {

const std::string kGolden = MAXSTAB_GOLDEN_DIR;

// Collects individual checks; the criterion passes when all of them do.
class Ledger {
 public:
  void check(bool ok, const std::string& what) {
    ++total_;
    if (!ok && failures_.size() < 5) failures_.push_back(what);
    failed_ += ok ? 0 : 1;
  }
  void note(const std::string& s) { notes_ += (notes_.empty() ? "" : "; ") + s; }
  bool pass() const { return failed_ == 0; }
  std::string summary() const {
    std::string s = std::to_string(total_ - failed_) + "/" + std::to_string(total_) + " checks";
    if (!notes_.empty()) s += "; " + notes_;
    for (const auto& f : failures_) s += "; failed: " + f;
    return s;
  }

 private:
  int total_ = 0;
  int failed_ = 0;
  std::vector<std::string> failures_;
  std::string notes_;
};

std::string fmt(double x, int digits = 4) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", digits, x);
  return buf;
}

ParamVector hr2(double l2) {
  Eigen::MatrixXd m(2, 2);
  m << 0, l2, l2, 0;
  return ParamVector::huesler_reiss(m);
}

ParamVector ext_t2(double rho, double nu) {
  Eigen::MatrixXd s(2, 2);
  s << 1, rho, rho, 1;
  return ParamVector::extremal_t(s, nu);
}

SpatialConfig line_sites(double scale = 1.0, double alpha = 1.0) {
  SpatialConfig c;
  c.locations = Eigen::MatrixXd(3, 1);
  c.locations << 0, 1, 3;
  c.scale = scale;
  c.alpha = alpha;
  return c;
}

// ---------------------------------------------------------------- partitions

// Independent oracle: recursive enumeration, each element either joins an
// existing block or opens a new one.
double brute_partition_sum(const std::vector<double>& v, int k) {
  std::vector<SubsetIndicator> blocks;
  std::function<double(int)> rec = [&](int i) -> double {
    if (i == k) {
      double p = 1.0;
      for (auto b : blocks) p *= v[b];
      return p;
    }
    double total = 0.0;
    const SubsetIndicator bit = SubsetIndicator{1} << i;
    for (std::size_t j = 0; j < blocks.size(); ++j) {
      blocks[j] |= bit;
      total += rec(i + 1);
      blocks[j] ^= bit;
    }
    blocks.push_back(bit);
    total += rec(i + 1);
    blocks.pop_back();
    return total;
  };
  return rec(0);
}

void partition_engine(Ledger& l) {
  const std::uint64_t expected[] = {1, 2, 5, 15, 52, 203, 877, 4140, 21147, 115975};
  // Bell triangle: the last entry of row k is B_k
  std::vector<std::uint64_t> row = {1};
  for (int k = 1; k <= 10; ++k) {
    l.check(bell_number(k) == expected[k - 1] && row.back() == expected[k - 1], "bell(" + std::to_string(k) + ")");
    std::vector<std::uint64_t> next = {row.back()};
    for (auto x : row) next.push_back(next.back() + x);
    row = next;
  }
  std::mt19937_64 gen(1);
  std::uniform_real_distribution<double> unif(0.05, 3.0);
  double worst = 0.0;
  for (int rep = 0; rep < 100; ++rep) {
    const int k = 1 + rep % 6;
    std::vector<double> vals(std::size_t{1} << k);
    for (auto& x : vals) x = unif(gen);
    const double dp = sum_partition_products(vals, k);
    const double brute = brute_partition_sum(vals, k);
    worst = std::max(worst, std::abs(dp - brute) / std::abs(brute));
  }
  l.check(worst < 1e-12, "DP vs enumeration");
  l.note("worst rel err " + fmt(worst));
}

// ---------------------------------------------------------------- structure

void structural_identities(Ledger& l) {
  Eigen::MatrixXd s3(3, 3);
  s3 << 1, 0.5, 0.3, 0.5, 1, 0.6, 0.3, 0.6, 1;
  const std::vector<ParamVector> points = {
      ParamVector::logistic(2, 0.3),
      ParamVector::logistic(3, 0.6),
      ParamVector::logistic(4, 0.9),
      hr2(1.0),
      map_spatial_params(line_sites()),
      map_spatial_params(line_sites(2.0, 0.5)),
      ParamVector::dirichlet(Eigen::Vector2d(1.0, 1.0)),
      ParamVector::dirichlet(Eigen::Vector2d(2.0, 1.0)),
      ParamVector::dirichlet(Eigen::Vector3d(1.0, 2.0, 0.5)),
      ext_t2(0.5, 2.0),
      ext_t2(0.2, 1.0),
      ParamVector::extremal_t(s3, 3.0),
  };
  int moments = 0;
  for (const auto& p : points) {
    const RegularityReport r = check_structure(p);
    for (const auto& c : r.checks) {
      l.check(c.pass, std::string(to_string(p.model())) + " k=" + std::to_string(p.dim()) + " " + c.name + " ratio " +
                          fmt(c.worst_ratio));
      moments += c.name == "angular_moment" ? 1 : 0;
    }
  }
  l.check(moments == 6, "angular moments checked for dirichlet and extremal-t, k = 2 and 3");
  l.note("12 parameter points");
}

// ---------------------------------------------------------------- density

double density(const Model& m, double z1, double z2) {
  const double z[2] = {z1, z2};
  return std::exp(log_density(m, z).log_density);
}

double fd_density(const Model& m, double z1, double z2, double h) {
  const double a = h * z1, b = h * z2;
  auto cdf = [&](double x, double y) {
    const double z[2] = {x, y};
    return std::exp(-m.exponent(z));
  };
  return (cdf(z1 + a, z2 + b) - cdf(z1 + a, z2 - b) - cdf(z1 - a, z2 + b) + cdf(z1 - a, z2 - b)) / (4.0 * a * b);
}

double frechet_of(double u) { return -1.0 / std::log(u); }

double unit_square_mass(const Model& m) {
  using boost::math::quadrature::gauss_kronrod;
  auto inner = [&](double u1) {
    const double z1 = frechet_of(u1);
    auto g = [&](double u2) {
      const double z2 = frechet_of(u2);
      return density(m, z1, z2) * z1 * z1 / u1 * z2 * z2 / u2;
    };
    return gauss_kronrod<double, 31>::integrate(g, 0.0, 1.0, 15, 1e-10);
  };
  return gauss_kronrod<double, 31>::integrate(inner, 0.0, 1.0, 15, 1e-9);
}

double marginal_at(const Model& m, double z1) {
  using boost::math::quadrature::gauss_kronrod;
  auto g = [&](double u2) {
    const double z2 = frechet_of(u2);
    return density(m, z1, z2) * z2 * z2 / u2;
  };
  return gauss_kronrod<double, 31>::integrate(g, 0.0, 1.0, 15, 1e-11);
}

void density_correctness(Ledger& l) {
  std::vector<std::pair<std::string, std::unique_ptr<Model>>> models;
  models.emplace_back("logistic", make_model(ParamVector::logistic(2, 0.5)));
  models.emplace_back("huesler_reiss", make_model(hr2(1.0)));
  std::mt19937_64 gen(2024);
  std::uniform_real_distribution<double> lz(-1.5, 1.5);
  double worst_fd = 0.0, worst_mass = 0.0, worst_margin = 0.0;
  for (const auto& [name, m] : models) {
    for (int t = 0; t < 50; ++t) {
      const double z1 = std::exp(lz(gen)), z2 = std::exp(lz(gen));
      const double exact = density(*m, z1, z2);
      const double fd = fd_density(*m, z1, z2, 1e-4);
      worst_fd = std::max(worst_fd, std::abs(exact - fd) / std::abs(fd));
    }
    worst_mass = std::max(worst_mass, std::abs(unit_square_mass(*m) - 1.0));
    for (double z1 : {0.5, 1.0, 3.0}) {
      const double frechet = std::exp(-2.0 * std::log(z1) - 1.0 / z1);
      worst_margin = std::max(worst_margin, std::abs(marginal_at(*m, z1) - frechet) / frechet);
    }
  }
  l.check(worst_fd < 1e-4, "mixed partial");
  l.check(worst_mass < 1e-4, "total mass");
  l.check(worst_margin < 1e-4, "marginal");
  l.note("FD rel err " + fmt(worst_fd) + ", |mass-1| " + fmt(worst_mass) + ", margin rel err " + fmt(worst_margin));
}

// ---------------------------------------------------------------- score / information

void score_and_information(Ledger& l) {
  std::mt19937_64 gen(7);
  std::uniform_real_distribution<double> th(0.1, 0.9), lz(-2.0, 2.0);
  double worst = 0.0;
  for (int t = 0; t < 100; ++t) {
    const ParamVector q = ParamVector::logistic(2 + t % 2, th(gen));
    std::vector<double> z(static_cast<std::size_t>(q.dim()));
    for (double& v : z) v = std::exp(lz(gen));
    const double a = score(q, z, ScoreMethod::analytic)(0);
    const double f = score(q, z, ScoreMethod::finite_diff)(0);
    worst = std::max(worst, std::abs(a - f) / std::max(std::abs(f), 1e-3));
  }
  l.check(worst < 1e-6, "analytic vs FD score");
  l.note("score rel err " + fmt(worst));

  const int draws = 100000;
  struct Case {
    std::string name;
    ParamVector p;
    ScoreMethod method;
  };
  const std::vector<Case> cases = {{"logistic", ParamVector::logistic(2, 0.6), ScoreMethod::analytic},
                                   {"huesler_reiss", hr2(1.0), ScoreMethod::finite_diff}};
  std::uint64_t seed = 100;
  for (const auto& c : cases) {
    const auto m = make_model(c.p);
    const Dataset data = simulate(*m, draws, seed++);
    const Eigen::MatrixXd s = score_matrix(c.p, data, c.method);
    const double mean = s.col(0).mean();
    const double sd = std::sqrt((s.col(0).array() - mean).square().sum() / (draws - 1));
    const double zscore = std::abs(mean) / (sd / std::sqrt(static_cast<double>(draws)));
    l.check(zscore < 3.0, c.name + " score mean");

    const FisherResult opg = fisher_opg(c.p, draws, seed++);
    const Parameterization chart = model_parameterization(c.p.model(), c.p.dim());
    const Dataset obs_data = simulate(*m, draws, seed++);
    const FisherResult obs = fisher_observed(chart, to_unconstrained(c.p), obs_data);
    const double combined = std::hypot(opg.standard_errors(0, 0), obs.standard_errors(0, 0));
    const double gap = std::abs(opg.info(0, 0) - obs.info(0, 0)) / combined;
    l.check(gap < 3.0, c.name + " Bartlett identity");
    l.note(c.name + ": score mean " + fmt(zscore, 3) + " SE, opg " + fmt(opg.info(0, 0)) + " vs observed " +
           fmt(obs.info(0, 0)) + " (" + fmt(gap, 3) + " SE)");
  }
}

// ---------------------------------------------------------------- simulation

double joint_ecdf(const Dataset& d, std::span<const double> z) {
  int hits = 0;
  for (int i = 0; i < d.size(); ++i) {
    const auto r = d.row(i);
    bool below = true;
    for (std::size_t c = 0; c < z.size(); ++c) below = below && r[c] <= z[c];
    hits += below ? 1 : 0;
  }
  return static_cast<double>(hits) / d.size();
}

double z_score(double empirical, double p, int n) { return std::abs(empirical - p) / std::sqrt(p * (1.0 - p) / n); }

double ks_two_sample(std::vector<double> a, std::vector<double> b) {
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  std::size_t i = 0, j = 0;
  double worst = 0.0;
  while (i < a.size() && j < b.size()) {
    const double x = std::min(a[i], b[j]);
    while (i < a.size() && a[i] <= x) ++i;
    while (j < b.size() && b[j] <= x) ++j;
    worst = std::max(worst, std::abs(static_cast<double>(i) / a.size() - static_cast<double>(j) / b.size()));
  }
  return worst;
}

void simulation_exactness(Ledger& l) {
  const int draws = 100000;
  const std::vector<std::pair<std::string, ParamVector>> cases = {
      {"logistic 0.3", ParamVector::logistic(2, 0.3)},
      {"logistic 0.7", ParamVector::logistic(2, 0.7)},
      {"huesler_reiss", hr2(1.0)},
      {"dirichlet", ParamVector::dirichlet(Eigen::Vector2d(2.0, 1.0))}};
  const std::vector<std::vector<double>> grid = {{1.0, 1.0}, {0.5, 2.0}, {2.0, 2.0}};
  double worst_joint = 0.0, worst_margin = 0.0, worst_ks = 0.0;
  std::uint64_t seed = 500;
  const int n_ks = 10000;
  const double critical = 1.628 * std::sqrt(2.0 / n_ks);
  for (const auto& [name, p] : cases) {
    const auto m = make_model(p);
    const Dataset d = simulate(*m, draws, seed++);
    for (const auto& z : grid) {
      const double zs = z_score(joint_ecdf(d, z), std::exp(-m->exponent(z)), draws);
      worst_joint = std::max(worst_joint, zs);
      l.check(zs < 3.0, name + " joint cdf");
    }
    for (int c = 0; c < 2; ++c) {
      for (double z : {0.5, 1.0, 2.0, 5.0}) {
        int hits = 0;
        for (int i = 0; i < draws; ++i) hits += d.row(i)[static_cast<std::size_t>(c)] <= z ? 1 : 0;
        const double zs = z_score(static_cast<double>(hits) / draws, std::exp(-1.0 / z), draws);
        worst_margin = std::max(worst_margin, zs);
        l.check(zs < 3.0, name + " margin");
      }
    }
    const Dataset single = simulate(*m, n_ks, seed++);
    const Dataset pool = simulate(*m, 5 * n_ks, seed++);
    for (int c = 0; c < 2; ++c) {
      std::vector<double> a, b;
      for (int i = 0; i < n_ks; ++i) {
        a.push_back(single.row(i)[static_cast<std::size_t>(c)]);
        double mx = 0.0;
        for (int r = 0; r < 5; ++r) mx = std::max(mx, pool.row(5 * i + r)[static_cast<std::size_t>(c)]);
        b.push_back(mx / 5.0);
      }
      const double ks = ks_two_sample(a, b);
      worst_ks = std::max(worst_ks, ks);
      l.check(ks < critical, name + " max-stability");
    }
  }
  l.note("worst joint " + fmt(worst_joint, 3) + " SE, worst margin " + fmt(worst_margin, 3) + " SE, worst KS " +
         fmt(worst_ks, 3) + " (critical " + fmt(critical, 3) + ")");
}

// ---------------------------------------------------------------- asymptotic normality

void asymptotic_normality(Ledger& l) {
  const std::vector<std::pair<std::string, ParamVector>> cases = {{"logistic", ParamVector::logistic(2, 0.6)},
                                                                  {"huesler_reiss", hr2(1.0)}};
  for (const auto& [name, p] : cases) {
    StudyConfig cfg(p);
    cfg.n = 200;
    cfg.replications = 400;
    cfg.master_seed = 7;
    cfg.fisher_draws = 100000;
    const StudyResult r = run_study(cfg);
    const StudySummary& s = r.summary;
    const double ratio = s.sd(0) / s.limit_sd(0);
    l.check(s.coverage >= 0.915 && s.coverage <= 0.975, name + " coverage " + fmt(s.coverage));
    l.check(std::abs(ratio - 1.0) <= 0.15, name + " sd ratio " + fmt(ratio));
    l.note(name + ": coverage " + fmt(s.coverage) + ", sd " + fmt(s.sd(0)) + " vs " + fmt(s.limit_sd(0)) +
           " (ratio " + fmt(ratio) + "), converged " + std::to_string(s.n_converged) + "/400");
  }
}

// ---------------------------------------------------------------- spatial

void spatial_corollaries(Ledger& l) {
  const ParamVector p = map_spatial_params(line_sites());
  l.check(p.lambda2()(0, 1) == 0.25 && p.lambda2()(0, 2) == 0.75 && p.lambda2()(1, 2) == 0.5, "variogram map");

  SpatialConfig tri;
  tri.locations = Eigen::MatrixXd(3, 2);
  tri.locations << 0, 0, 1, 0, 0.5, std::sqrt(3.0) / 2.0;
  bool raised = false;
  try {
    map_spatial_params(tri);
  } catch (const Error& e) {
    raised = e.code() == ErrorCode::NotIdentifiable;
  }
  l.check(raised, "equilateral configuration");

  const Dataset data = simulate(*make_model(p), 500, 31);
  const Parameterization chart = brown_resnick_parameterization(line_sites().locations);
  FitOptions opts;
  opts.starts = 1;
  const FitResult r = fit(chart, data, brown_resnick_unconstrained(2.0, 0.7), opts);
  l.check(r.converged, "fit converged");
  std::string intervals;
  for (const auto& w : r.wald_intervals) {
    l.check(w.lower <= 1.0 && 1.0 <= w.upper, w.name + " interval");
    intervals += (intervals.empty() ? "" : ", ") + w.name + " [" + fmt(w.lower) + ", " + fmt(w.upper) + "]";
  }
  l.check(r.wald_intervals.size() == 2, "two intervals");
  l.note(intervals);
}

// ---------------------------------------------------------------- regularity

void regularity_audit(Ledger& l) {
  const auto schema = schema_check::load(kGolden + "/regularity_report.schema.json");
  AuditOptions options;
  l.check(options.margin <= 1.1, "margin");
  const std::vector<std::pair<std::string, RegularityReport>> reports = {
      {"logistic A3", audit_a3(ParamVector::logistic(2, 0.5), 0.25, options)},
      {"huesler_reiss A3", audit_a3(hr2(1.0), 0.0, options)},
      {"dirichlet B3", audit_b3(ParamVector::dirichlet(Eigen::Vector2d(2.0, 1.0)), std::nullopt, options)},
      {"extremal_t B3", audit_b3(ext_t2(0.5, 1.0), std::nullopt, options)}};
  for (const auto& [name, r] : reports) {
    l.check(r.all_pass(), name);
    int fit_size = 0, verify_size = 0;
    for (const auto& c : r.checks) {
      if (c.name.find("_fit") != std::string::npos) fit_size = std::max(fit_size, c.grid_size);
      if (c.name.find("_verify") != std::string::npos) verify_size = std::max(verify_size, c.grid_size);
    }
    l.check(verify_size > fit_size, name + " verification grid is finer");
    const std::string err = schema_check::validate(nlohmann::json::parse(dump_json(to_json(r))), schema);
    l.check(err.empty(), name + " schema: " + err);
  }
  l.note("A3 constants " + fmt(reports[0].second.a3->a) + " (logistic), " + fmt(reports[1].second.a3->a) + " (HR)");
}

// ---------------------------------------------------------------- reproducibility

std::string run_cli(const std::string& args) {
  const std::string out = (std::filesystem::temp_directory_path() /
                           ("maxstab_acceptance_" + std::to_string(::getpid()) + ".out"))
                              .string();
  const std::string cmd = std::string("\"") + MAXSTAB_CLI + "\" " + args + " >\"" + out + "\" 2>/dev/null";
  const int status = std::system(cmd.c_str());
  std::string text = read_text_file(out);
  std::filesystem::remove(out);
  if (!WIFEXITED(status) || WEXITSTATUS(status) != 0) return "exit status " + std::to_string(status);
  return text;
}

void reproducibility(Ledger& l) {
  const std::string inputs = kGolden + "/inputs";
  const std::vector<std::string> pipelines = {
      "simulate --params " + inputs + "/hr2.json --n 1000 --seed 7",
      "simulate --params " + inputs + "/dirichlet2.json --n 1000 --seed 8",
      "simulate --params " + inputs + "/logistic2.json --n 1000 --seed 9",
      "study --params " + inputs + "/study_smoke.json"};
  for (const auto& p : pipelines) {
    const std::string a = run_cli(p + " --threads 1");
    const std::string b = run_cli(p + " --threads 1");
    const std::string c = run_cli(p + " --threads 4");
    l.check(!a.empty() && a.rfind("exit status", 0) != 0, p + " runs");
    l.check(a == b, p + " across runs");
    l.check(a == c, p + " across thread counts");
  }
}

}  // namespace

int main() {
  struct Criterion {
    std::string name;
    double limit_seconds;
    std::function<void(Ledger&)> body;
  };
  const std::vector<Criterion> criteria = {
      {"partition engine", 1.0, partition_engine},
      {"structural identities", 60.0, structural_identities},
      {"density correctness", 60.0, density_correctness},
      {"score and information", 120.0, score_and_information},
      {"simulation exactness", 180.0, simulation_exactness},
      {"asymptotic normality", 600.0, asymptotic_normality},
      {"spatial corollaries", 300.0, spatial_corollaries},
      {"regularity audit", 120.0, regularity_audit},
      {"reproducibility", 600.0, reproducibility},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    Ledger l;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      c.body(l);
    } catch (const std::exception& e) {
      l.check(false, std::string("exception: ") + e.what());
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const bool in_time = secs < c.limit_seconds;
    const bool ok = l.pass() && in_time;
    failed += ok ? 0 : 1;
    std::printf("%s  %-22s %s [%.2f s, limit %.0f s%s]\n", ok ? "PASS" : "FAIL", c.name.c_str(), l.summary().c_str(),
                secs, c.limit_seconds, in_time ? "" : ", too slow");
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
