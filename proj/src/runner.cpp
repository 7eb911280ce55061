#include "sqfn/runner.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>

#include "sqfn/inequalities.hpp"
#include "sqfn/json_io.hpp"
#include "sqfn/parallel.hpp"
#include "sqfn/random.hpp"
#include "sqfn/weights.hpp"

namespace sqfn {

namespace {

// Suites whose statements need E f = 0 get a centered input.
bool needs_centering(const std::string& suite) {
  return suite == "maximal" || suite == "goodlambda" || suite == "modification" || suite == "weighted" ||
         suite == "unweighted" || suite == "ratios";
}

std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::uint64_t input_seed(const ExperimentConfig& c, const std::string& suite, std::uint64_t trial) {
  return trial_seed(c.seed ^ fnv1a(suite), trial);
}

TreePtr trial_tree(const ExperimentConfig& c, std::uint64_t seed) {
  if (c.tree.kind == "nadic") return build_nadic(c.tree.n, c.tree.depth);
  RandomTreeOptions opt;
  opt.alpha_min = c.tree.alpha_min;
  opt.alpha_max = c.tree.alpha_max;
  opt.max_depth = c.tree.max_depth;
  opt.max_leaves = c.tree.max_leaves;
  return random_tree(seed, opt);
}

StepFunction centered(const StepFunction& f) {
  const double mean = f.integral();
  std::vector<double> v(f.values().begin(), f.values().end());
  for (double& x : v) x -= mean;
  return StepFunction(f.tree_ptr(), std::move(v));
}

StepFunction ones(const TreePtr& tree) { return StepFunction(tree, std::vector<double>(tree->leaf_count(), 1.0)); }

StepFunction trial_weight(const ExperimentConfig& c, const TreePtr& tree, std::uint64_t seed) {
  return random_spike_weight(tree, splitmix64(seed + 2), c.function.weight_spikes);
}

std::vector<double> scaled(const std::vector<double>& factors, double unit) {
  std::vector<double> out;
  for (double x : factors) out.push_back(x * (unit > 0.0 ? unit : 1.0));
  return out;
}

// Median of |<f>_Q| over all atoms.
double median_abs_average(const StepFunction& f) {
  std::vector<double> a = atom_averages(f);
  for (double& x : a) x = std::abs(x);
  auto mid = a.begin() + static_cast<std::ptrdiff_t>(a.size() / 2);
  std::nth_element(a.begin(), mid, a.end());
  return *mid;
}

InequalityReport guarantee_row(const char* name, double alpha, double lambda, double eps, double lhs, double rhs) {
  InequalityReport r;
  r.name = name;
  r.alpha = alpha;
  r.lambda = lambda;
  r.epsilon = eps;
  r.lhs = lhs;
  r.rhs = rhs;
  finalize_strict(r);
  return r;
}

// Stopping atoms examined per (f, eps) in the modification suite.
constexpr std::size_t kModificationAtoms = 8;

std::vector<InequalityReport> modification_rows(const StepFunction& f, double lambda, double eps) {
  std::vector<InequalityReport> rows;
  const double alpha = f.tree().homogeneity().effective_alpha;
  const auto stop = stopped_function(f, lambda).stopping;
  for (std::size_t i = 0; i < std::min(stop.size(), kModificationAtoms); ++i) {
    const GoodLambdaModification m = good_lambda_modified(f, lambda, eps, stop[i]);
    rows.push_back(guarantee_row("good_lambda_f3_sup", alpha, lambda, eps, m.sup_sf3_squared, m.sf3_bound));
    rows.push_back(guarantee_row("good_lambda_f3_agree", alpha, lambda, eps, m.agree_outside ? 0.0 : 1.0, 0.0));
    rows.push_back(guarantee_row("good_lambda_f3_contains", alpha, lambda, eps, m.contains_e_q ? 0.0 : 1.0, 0.0));
    rows.push_back(guarantee_row("good_lambda_f3_mean", alpha, lambda, eps, m.max_mean_error, 0.0));
  }
  return rows;
}

// E is grown from the leaves of largest w until its measure would pass `share` of |Q0|.
std::vector<AtomId> heavy_leaves(const StepFunction& w, double share) {
  const FiltrationTree& t = w.tree();
  std::vector<std::size_t> order(w.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return w[a] > w[b]; });
  std::vector<AtomId> e;
  double measure = 0.0;
  for (std::size_t leaf : order) {
    const double m = t.leaf_measures()[leaf];
    if (measure + m > share) break;
    measure += m;
    e.push_back(t.leaf_atom(leaf));
  }
  return e;
}

std::vector<InequalityReport> extrapolation_rows(const ExperimentConfig& c, const StepFunction& phi) {
  const double p = c.extrapolation.p;
  const double cm = c.extrapolation.c_m;
  InequalityReport a1;
  a1.name = "rubio_a1";
  a1.alpha = phi.tree().homogeneity().effective_alpha;
  a1.p = p;
  InequalityReport norm = a1;
  norm.name = "rubio_norm";
  try {
    const RubioWeight rw = rubio_weight(phi, p, cm);
    a1.lhs = rw.a1;
    a1.rhs = cm * p * (1.0 + 1e-6);
    a1.extras = {{"terms", rw.terms}, {"relative_slack", rw.relative_slack}};
    norm.lhs = rw.norm_w;
    norm.rhs = 2.0 * rw.norm_phi * (1.0 + 1e-6);
    finalize_strict(a1);
    finalize_strict(norm);
  } catch (const ResolutionError& e) {
    for (InequalityReport* r : {&a1, &norm}) {
      r->lhs = kNaN;
      r->rhs = kNaN;
      r->margin = kNaN;
      r->status = ReportStatus::Fail;
      r->note = e.what();
    }
  }
  return {a1, norm};
}

std::vector<InequalityReport> lp_superexp_rows(const ExperimentConfig& c, double alpha) {
  const int n = static_cast<int>(std::ceil(2.0 / (alpha * alpha) - 1e-9));
  const SharpnessFamily fam = build_sharpness(alpha, n);
  // f = g_N / ||S g_N||_inf, so ||S f||_inf = 1 plays the role of g_sup.
  const StepFunction f = (1.0 / fam.sup_sg) * fam.g;
  const std::vector<double> lambdas{0.5, 1.0, 2.0, 3.0, 4.0};
  LpToSuperexp r = verify_lp_to_superexp(f, 1.0, c.extrapolation.kappa, 0.0, lambdas);
  return std::move(r.reports);
}

using TrialFn = std::function<std::vector<InequalityReport>(std::uint64_t)>;

TrialFn trial_body(const ExperimentConfig& c, const std::string& s) {
  auto input = [&c, s](std::uint64_t t) { return trial_function(c, s, t, needs_centering(s)); };
  if (s == "bellman") return [input](std::uint64_t t) { return std::vector{verify_exp_bellman(input(t))}; };
  if (s == "moment") return [input](std::uint64_t t) { return std::vector{verify_exp_moment(input(t))}; };
  if (s == "distribution" || s == "maximal") {
    return [&c, s, input](std::uint64_t t) {
      const StepFunction f = input(t);
      const auto lambdas = scaled(c.lambda_factors, square_function(f).max());
      return s == "distribution" ? verify_superexp_distribution(f, lambdas) : verify_superexp_maximal(f, lambdas);
    };
  }
  if (s == "goodlambda" || s == "modification") {
    return [&c, s, input](std::uint64_t t) {
      const StepFunction f = input(t);
      const double lambda = median_abs_average(f);
      std::vector<InequalityReport> rows;
      if (!(lambda > 0.0)) return rows;
      for (double eps : c.epsilons) {
        auto r = s == "goodlambda" ? verify_good_lambda(f, lambda, eps) : modification_rows(f, lambda, eps);
        rows.insert(rows.end(), r.begin(), r.end());
      }
      return rows;
    };
  }
  if (s == "weighted") {
    return [&c, s, input](std::uint64_t t) {
      const StepFunction f = input(t);
      std::vector<InequalityReport> rows;
      for (const StepFunction& w : {ones(f.tree_ptr()), trial_weight(c, f.tree_ptr(), input_seed(c, s, t))}) {
        for (double p : c.ps) rows.push_back(verify_weighted_lower_bound(f, w, p));
      }
      return rows;
    };
  }
  if (s == "unweighted") {
    return [&c, input](std::uint64_t t) {
      const StepFunction f = input(t);
      std::vector<InequalityReport> rows;
      for (double p : c.ps) rows.push_back(verify_unweighted_lp(f, p));
      return rows;
    };
  }
  if (s == "cww") {
    return [&c, input](std::uint64_t t) {
      const StepFunction f = input(t);
      return verify_cww_sinf(f, scaled(c.lambda_factors, square_function_p(f, kInfinity).max()));
    };
  }
  if (s == "w_of_e") {
    return [&c, s](std::uint64_t t) {
      const std::uint64_t seed = input_seed(c, s, t);
      const StepFunction w = trial_weight(c, trial_tree(c, seed), seed);
      std::vector<InequalityReport> rows;
      for (double share : {0.5, 1.0 / 16.0}) {
        const auto e = heavy_leaves(w, share);
        if (!e.empty()) rows.push_back(verify_w_of_E(w, FiltrationTree::root(), e));
      }
      return rows;
    };
  }
  if (s == "ratios") {
    return [&c, s, input](std::uint64_t t) {
      const StepFunction f = input(t);
      const StepFunction w = trial_weight(c, f.tree_ptr(), input_seed(c, s, t));
      return std::vector{verify_wilson_ratio(f, w, 2.0), verify_diptv_ratio(f, w),
                         verify_diptv_martingale_ratio(f, w), verify_ainfty_scl_ratio(w)};
    };
  }
  if (s == "extrapolation") {
    return [&c, s](std::uint64_t t) {
      const std::size_t alphas = c.extrapolation.sharpness_alphas.size();
      if (t < alphas) return lp_superexp_rows(c, c.extrapolation.sharpness_alphas[t]);
      const std::uint64_t seed = input_seed(c, s, t);
      const StepFunction phi = trial_weight(c, trial_tree(c, seed), seed);
      // Normalized in L^{r'}, r = p/2.
      const double r = c.extrapolation.p / 2.0;
      const double norm = lp_norm(phi, r == 1.0 ? kInfinity : r / (r - 1.0));
      return extrapolation_rows(c, (1.0 / norm) * phi);
    };
  }
  throw PreconditionError("suite '" + s + "' has no trial body");
}

// Trials of the extrapolation suite: the g_N inputs plus at most 50 random weights.
constexpr std::uint64_t kExtrapolationTrials = 50;

std::uint64_t trial_count(const ExperimentConfig& c, const std::string& s) {
  if (s == "extrapolation") {
    return c.extrapolation.sharpness_alphas.size() + std::min<std::uint64_t>(c.trials, kExtrapolationTrials);
  }
  return static_cast<std::uint64_t>(c.trials);
}

std::vector<double> default_sharpness_lambdas() {
  std::vector<double> l;
  for (int x = 20; x <= 60; x += 2) l.push_back(x);
  return l;
}

ScalarCertificate optimal_c_certificate(const std::vector<OptimalCEntry>& entries, std::size_t grid) {
  ScalarCertificate c;
  c.name = "optimal_C_vs_alpha";
  c.params = {{"grid", static_cast<double>(grid)}, {"alphas", static_cast<double>(entries.size())}};
  c.worst_margin = -kInfinity;
  for (const auto& e : entries) {
    // C(alpha) >= alpha is what the two-point lemma asserts.
    const double m = e.alpha - 1e-6 - e.result.value;
    ++c.evaluations;
    if (m > c.worst_margin) {
      c.worst_margin = m;
      c.worst_location = {{"alpha", e.alpha}, {"C", e.result.value}};
    }
  }
  return c;
}

void run_certificates(const ExperimentConfig& config, RunResult& out) {
  const CertificateSpec& cs = config.certificates;
  std::vector<std::function<ScalarCertificate()>> jobs;
  for (int n = cs.dzili_min; n <= cs.dzili_max; ++n) {
    jobs.emplace_back([n, &cs] { return check_dzili(n, cs.dzili_grid); });
  }
  for (double a : cs.alphas) {
    jobs.emplace_back([a, &cs] { return check_two_point_lemma(a, TwoPointStrategy::Reduced, cs.two_point_grid); });
    jobs.emplace_back([a, &cs, &config] {
      return check_two_point_lemma(a, TwoPointStrategy::Random, cs.two_point_grid, config.seed);
    });
  }
  jobs.emplace_back([&cs] {
    ScalarCertificate c;
    c.name = "rm1";
    c.params = {{"C", 1.0}, {"alpha", cs.rm1_alpha}};
    c.worst_margin = check_rm1(1.0, cs.rm1_alpha);
    c.worst_location = c.params;
    c.evaluations = 1;
    return c;
  });
  std::vector<ScalarCertificate> certs(jobs.size());
  out.optimal_c.resize(cs.alphas.size());
  const std::size_t total = jobs.size() + cs.alphas.size();
  parallel_for(total, [&](std::size_t i) {
    if (i < jobs.size()) {
      certs[i] = jobs[i]();
    } else {
      const double a = cs.alphas[i - jobs.size()];
      out.optimal_c[i - jobs.size()] = {a, optimal_C(a, 1e-6, cs.optimal_grid)};
    }
  });
  certs.push_back(optimal_c_certificate(out.optimal_c, cs.optimal_grid));
  out.series = superexp_constant(cs.series_eps);
  for (const auto& c : certs) {
    if (!c.certified()) out.failures.push_back("certificate " + c.name + ": worst margin " + format_double(c.worst_margin));
  }
  out.certificates = std::move(certs);
}

void run_sharpness(const ExperimentConfig& config, RunResult& out, SuiteSummary& summary) {
  const auto lambdas = config.sharpness.lambdas.empty() ? default_sharpness_lambdas() : config.sharpness.lambdas;
  out.sharpness = sharpness_sweep(config.sharpness.alpha, lambdas, config.sharpness.c);
  out.has_sharpness = true;
  for (const auto& pt : out.sharpness.points) {
    InequalityReport r;
    r.name = "sharpness_f_lambda";
    r.alpha = config.sharpness.alpha;
    r.lambda = pt.lambda;
    r.lhs = pt.measure;
    r.rhs = pt.bound;
    finalize_ratio(r);
    out.reports.push_back(r);
    ++summary.rows;
  }
}

std::string failure_line(const std::string& suite, std::uint64_t trial, const InequalityReport& r) {
  std::ostringstream os;
  os << suite << " trial " << trial << ": " << r.name;
  if (!std::isnan(r.lambda)) os << " lambda=" << format_double(r.lambda);
  if (!std::isnan(r.epsilon)) os << " eps=" << format_double(r.epsilon);
  if (!std::isnan(r.p)) os << " p=" << format_double(r.p);
  os << " lhs=" << format_double(r.lhs) << " rhs=" << format_double(r.rhs);
  if (!r.note.empty()) os << " (" << r.note << ")";
  return os.str();
}

}  // namespace

StepFunction trial_function(const ExperimentConfig& config, const std::string& suite, std::uint64_t trial,
                            bool center) {
  const std::uint64_t seed = input_seed(config, suite, trial);
  TreePtr tree = trial_tree(config, seed);
  StepFunction f = random_function(tree, splitmix64(seed + 1), parse_model(config.function.model), config.function.scale);
  return center ? centered(f) : f;
}

RunResult run_suites(const ExperimentConfig& config) {
  RunResult out;
  for (const std::string& name : known_suites()) {
    if (std::find(config.suites.begin(), config.suites.end(), name) == config.suites.end()) continue;
    SuiteSummary summary{name};
    if (name == "certificates") {
      run_certificates(config, out);
      summary.rows = out.certificates.size();
      for (const auto& c : out.certificates) summary.failures += c.certified() ? 0 : 1;
      out.suites.push_back(summary);
      continue;
    }
    if (name == "sharpness") {
      run_sharpness(config, out, summary);
      out.suites.push_back(summary);
      continue;
    }
    const TrialFn body = trial_body(config, name);
    const std::uint64_t n = trial_count(config, name);
    std::vector<std::vector<InequalityReport>> rows(n);
    parallel_for(n, [&](std::size_t t) { rows[t] = body(t); });
    for (std::uint64_t t = 0; t < n; ++t) {
      for (auto& r : rows[t]) {
        ++summary.rows;
        if (r.status == ReportStatus::Degenerate) ++summary.degenerate;
        if (r.failed()) {
          ++summary.failures;
          out.failures.push_back(failure_line(name, t, r));
        }
        out.reports.push_back(std::move(r));
      }
    }
    out.suites.push_back(summary);
  }
  return out;
}

void write_sharpness_csv(std::ostream& os, const SharpnessSweep& sweep) {
  os << "lambda,measure,bound,ratio\n";
  for (const auto& pt : sweep.points) {
    os << format_double(pt.lambda) << ',' << format_double(pt.measure) << ',' << format_double(pt.bound) << ','
       << format_double(pt.ratio) << '\n';
  }
}

void write_distribution_svg(std::ostream& os, const StepFunction& f, int points) {
  const double sf = square_function(f).max();
  const double alpha = f.tree().homogeneity().effective_alpha;
  const StepFunction g = centered(f);
  const double top = std::max(g.max(), 1e-300);
  std::vector<double> x;
  std::vector<double> measured;
  std::vector<double> bound;
  for (int j = 1; j <= points; ++j) {
    const double lambda = top * j / points;
    x.push_back(lambda * lambda);
    measured.push_back(log_distribution(g, lambda * (1.0 - 1e-12)));
    bound.push_back(sf > 0.0 ? -alpha * lambda * lambda / (sf * sf) : 0.0);
  }
  double ymin = 0.0;
  for (double y : measured) {
    if (std::isfinite(y)) ymin = std::min(ymin, y);
  }
  for (double y : bound) ymin = std::min(ymin, y);
  ymin = std::min(ymin, -1.0);
  const double xmax = x.back();
  constexpr double W = 640, H = 400, L = 60, R = 20, T = 20, B = 50;
  auto px = [&](double v) { return L + (W - L - R) * v / xmax; };
  auto py = [&](double v) { return T + (H - T - B) * v / ymin; };
  auto polyline = [&](const std::vector<double>& ys, const char* colour) {
    os << "<polyline fill=\"none\" stroke=\"" << colour << "\" stroke-width=\"2\" points=\"";
    for (std::size_t i = 0; i < ys.size(); ++i) {
      if (std::isfinite(ys[i])) os << format_double(px(x[i])) << ',' << format_double(py(ys[i])) << ' ';
    }
    os << "\"/>\n";
  };
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H << "\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  os << "<line x1=\"" << L << "\" y1=\"" << T << "\" x2=\"" << L << "\" y2=\"" << H - B << "\" stroke=\"black\"/>\n";
  os << "<line x1=\"" << L << "\" y1=\"" << T << "\" x2=\"" << W - R << "\" y2=\"" << T << "\" stroke=\"black\"/>\n";
  polyline(bound, "#c0392b");
  polyline(measured, "#1f4e9c");
  os << "<text x=\"" << W / 2 << "\" y=\"" << H - 15 << "\" text-anchor=\"middle\" font-size=\"13\">lambda^2 (max "
     << format_double(xmax) << ")</text>\n";
  os << "<text x=\"15\" y=\"" << H / 2 << "\" transform=\"rotate(-90 15 " << H / 2
     << ")\" text-anchor=\"middle\" font-size=\"13\">ln measure (min " << format_double(ymin) << ")</text>\n";
  os << "<text x=\"" << W - R - 5 << "\" y=\"" << H - B - 30
     << "\" text-anchor=\"end\" font-size=\"12\" fill=\"#1f4e9c\">ln |{f - Ef &gt; lambda}|</text>\n";
  os << "<text x=\"" << W - R - 5 << "\" y=\"" << H - B - 12
     << "\" text-anchor=\"end\" font-size=\"12\" fill=\"#c0392b\">-alpha lambda^2 / ||Sf||^2</text>\n";
  os << "</svg>\n";
}

void write_artifacts(const ExperimentConfig& config, const RunResult& result) {
  namespace fs = std::filesystem;
  fs::create_directories(config.out_dir);
  auto open = [&](const std::string& name) {
    std::ofstream os(config.out_dir / name, std::ios::binary);
    if (!os) throw PreconditionError("cannot write " + (config.out_dir / name).string());
    return os;
  };
  {
    auto os = open(config.report);
    write_csv(os, result.reports);
  }
  if (!config.certs.empty()) {
    Json j;
    j["seed"] = config.seed;
    j["suites"] = Json::array();
    for (const auto& s : result.suites) {
      j["suites"].push_back({{"name", s.name}, {"rows", s.rows}, {"failures", s.failures}, {"degenerate", s.degenerate}});
    }
    j["certificates"] = Json::array();
    for (const auto& c : result.certificates) j["certificates"].push_back(certificate_to_json(c));
    j["optimal_C"] = Json::array();
    for (const auto& e : result.optimal_c) {
      j["optimal_C"].push_back({{"alpha", e.alpha},
                                {"value", e.result.value},
                                {"lower", e.result.lower},
                                {"upper", e.result.upper},
                                {"iterations", e.result.iterations}});
    }
    if (result.series.terms > 0) {
      j["series"] = {{"value", result.series.value},
                     {"terms", result.series.terms},
                     {"last_term", result.series.last_term},
                     {"tail_bound", result.series.tail_bound}};
    }
    if (result.has_sharpness) {
      j["sharpness"] = {{"alpha", config.sharpness.alpha},
                        {"c", config.sharpness.c},
                        {"lambda0", result.sharpness.lambda0},
                        {"above_lambda0", result.sharpness.above_lambda0}};
    }
    j["failures"] = result.failures;
    auto os = open(config.certs);
    os << j.dump(2) << '\n';
  }
  if (result.has_sharpness && !config.sharpness_csv.empty()) {
    auto os = open(config.sharpness_csv);
    write_sharpness_csv(os, result.sharpness);
  }
  if (!config.plot.empty()) {
    auto os = open(config.plot);
    write_distribution_svg(os, trial_function(config, "distribution", 0, false));
  }
}

}  // namespace sqfn
