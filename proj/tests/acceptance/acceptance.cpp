// Acceptance suite: one PASS/FAIL line per criterion.
//
//   sqfn_acceptance [--strict] [--cli PATH] [--config PATH]
//
// Exit status is 0 when every criterion passes or the only failures are the
// ones listed in kKnownUnattainable (reported as FAIL, never skipped); --strict
// turns those into a nonzero exit as well.

#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "generators.hpp"
#include "oracles/oracles.hpp"
#include "sqfn/certificates.hpp"
#include "sqfn/config.hpp"
#include "sqfn/constructions.hpp"
#include "sqfn/exact.hpp"
#include "sqfn/random.hpp"
#include "sqfn/runner.hpp"
#include "sqfn/weights.hpp"

using namespace sqfn;
namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

struct Outcome {
  bool pass = false;
  std::string detail;
};

struct Criterion {
  int id;
  const char* title;
  std::function<Outcome()> run;
};

// Criteria that cannot hold for the construction as specified; see README.
const std::set<int> kKnownUnattainable{3};

std::string g_cli;
fs::path g_config;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(const char* f, double a) {
  char buf[128];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

ExperimentConfig sweep_config(std::vector<std::string> suites, int trials) {
  ExperimentConfig c = load_config(g_config);
  c.suites = std::move(suites);
  c.trials = trials;
  return c;
}

// Runs suites and summarizes failures; `limit` caps the runtime in seconds (0: none).
Outcome run_sweep(std::vector<std::string> suites, int trials, double limit) {
  const auto t0 = Clock::now();
  const RunResult r = run_suites(sweep_config(std::move(suites), trials));
  const double secs = seconds_since(t0);
  std::ostringstream os;
  for (const auto& s : r.suites) os << s.name << " " << s.rows << " rows/" << s.failures << " failed, ";
  os << fmt("%.1f s", secs);
  if (!r.failures.empty()) os << "; first failure: " << r.failures.front();
  return {r.failures.empty() && (limit <= 0.0 || secs < limit), os.str()};
}

Outcome criterion_bellman() { return run_sweep({"bellman"}, 1000, 60.0); }

Outcome criterion_distribution() { return run_sweep({"distribution", "maximal"}, 1000, 0.0); }

Outcome criterion_example_2d() {
  const int k = 10;
  const StepFunction f = build_example_2d(k);
  const StepFunction s = square_function(f);
  const StepFunction sinf = square_function_p(f, kInfinity);
  std::size_t sf_one = 0;
  for (std::size_t i = 0; i < f.size(); ++i) sf_one += std::abs(s[i] - 1.0) <= 1e-12;
  const double top = sinf.max();
  std::uint32_t strip_end = 0;  // attaining leaves, as the x1 cells [0, strip_end)
  bool strip = true;
  std::set<std::uint32_t> cells;
  for (std::size_t i = 0; i < f.size(); ++i) {
    if (std::abs(sinf[i] - top) <= 1e-12) cells.insert(square_cell(i, k).first);
  }
  for (std::uint32_t x : cells) strip = strip && x == strip_end++;
  // An x1-strip of attainment must also hold every x2 cell of its columns.
  for (std::size_t i = 0; i < f.size(); ++i) {
    const bool in = square_cell(i, k).first < strip_end;
    strip = strip && (in == (std::abs(sinf[i] - top) <= 1e-12));
  }
  const bool sf_ok = sf_one == f.size();
  const bool top_ok = std::abs(top - std::sqrt(k)) <= 1e-12;
  std::ostringstream os;
  os << "Sf = 1 on " << sf_one << "/" << f.size() << " leaves (Sf = 0 on x1 < 2^-" << k
     << "), max S_inf = " << fmt("%.15g", top) << " vs sqrt(10) = " << fmt("%.15g", std::sqrt(10.0))
     << ", attained on x1 < " << strip_end << "*2^-" << k << (strip ? " (a full strip)" : " (not a strip)");
  return {sf_ok && top_ok && strip, os.str()};
}

Outcome criterion_sharpness_exact() {
  bool ok = true;
  std::ostringstream os;
  for (int m : {4, 8, 16}) {
    const mpq_class a(1, m);
    const int n = 2 * m * m;  // ceil(2 / alpha^2)
    const SharpnessFamily fam = build_sharpness(a, n);
    const auto s2 = exact_square_function_squared(*fam.g_exact);
    const mpq_class top = *std::max_element(s2.begin(), s2.end());
    const mpq_class want = n - 1 + (1 - a) * (1 - a) / (a * a);
    mpq_class beta = 1;
    for (int i = 0; i < n; ++i) beta *= 1 - a;
    const mpq_class tail = exact_distribution(*fam.g_exact, mpq_class(2 * n - 1, 2));
    const bool good = top == want && tail == beta;
    ok = ok && good;
    os << (m == 4 ? "" : "; ") << "alpha=" << a.get_str() << " N=" << n << (good ? " exact" : " MISMATCH");
  }
  return {ok, os.str()};
}

Outcome criterion_sharpness_asymptotics() {
  std::vector<double> lambdas;
  for (int l = 20; l <= 60; l += 2) lambdas.push_back(l);
  const SharpnessSweep sw = sharpness_sweep(1.0 / 16.0, lambdas, 1.2);
  const double last_ratio = sw.points.empty() ? 0.0 : sw.points.back().ratio;
  std::ostringstream os;
  os << "lambda0 = " << sw.lambda0 << ", " << sw.above_lambda0 << " tested lambdas >= lambda0 exceed e^{-c alpha lambda^2}, "
     << "ratio at lambda = " << (sw.points.empty() ? 0.0 : sw.points.back().lambda) << " is " << fmt("%.4f", last_ratio);
  const bool ok = sw.lambda0 > 0.0 && sw.above_lambda0 >= 10 && last_ratio >= 1.0 && last_ratio <= 1.25;
  return {ok, os.str()};
}

Outcome criterion_good_lambda() { return run_sweep({"goodlambda"}, 500, 0.0); }

Outcome criterion_lp() { return run_sweep({"weighted", "unweighted"}, 200, 0.0); }

Outcome criterion_certificates() {
  std::ostringstream os;
  bool ok = true;
  double dz_worst = -kInfinity;
  bool dz_equal = true;
  for (int n = 2; n <= 100; ++n) {
    const ScalarCertificate c = check_dzili(n, 100000);
    dz_worst = std::max(dz_worst, c.worst_margin);
    dz_equal = dz_equal && dzili_excess(n, 1.0) == 0.0;
  }
  ok = ok && dz_worst <= 1e-9 && dz_equal;
  os << "dzili worst " << fmt("%.3g", dz_worst) << (dz_equal ? ", equality at a=1" : ", NO equality at a=1");

  double tp_worst = -kInfinity;
  for (int i = 1; i <= 10; ++i) {
    const double alpha = 0.05 * i;
    for (auto s : {TwoPointStrategy::Reduced, TwoPointStrategy::Random}) {
      tp_worst = std::max(tp_worst, check_two_point_lemma(alpha, s, 100000, 1).worst_margin);
    }
  }
  ok = ok && tp_worst <= 1e-9;
  os << "; two-point worst " << fmt("%.3g", tp_worst);

  const double a10 = std::ldexp(1.0, -10);
  const double r09 = check_rm1(0.9, a10);
  const double r1 = check_rm1(1.0, a10);
  ok = ok && r09 > 0.0 && r1 <= 0.0;
  os << "; rm1 " << fmt("%.3g", r09) << " / " << fmt("%.3g", r1);

  const double c_half = optimal_C(0.5).value;
  ok = ok && std::abs(c_half - 0.5) <= 1e-3;
  double worst_gap = kInfinity;
  for (int i = 1; i <= 10; ++i) {
    const double alpha = 0.05 * i;
    worst_gap = std::min(worst_gap, optimal_C(alpha).value - alpha);
  }
  ok = ok && worst_gap >= -1e-6;
  os << "; C(1/2) = " << fmt("%.6f", c_half) << ", min C(alpha) - alpha = " << fmt("%.3g", worst_gap);
  return {ok, os.str()};
}

bool close(double got, double want, double tol) { return std::abs(got - want) <= tol * std::max(1.0, std::abs(want)); }

Outcome criterion_oracles() {
  std::size_t trees = 0;
  std::size_t mismatches = 0;
  gen::Rng rng(2024);
  auto check_tree = [&](const TreePtr& t) {
    ++trees;
    const StepFunction f = gen::random_function(rng, t);
    const auto s = square_function(f);
    const auto s2 = oracle::square_squared(f);
    const auto mx = maximal_function(f);
    const auto mw = oracle::maximal(f);
    for (std::size_t i = 0; i < f.size(); ++i) {
      mismatches += !close(s[i], std::sqrt(s2[i]), 1e-10);
      mismatches += !close(mx[i], mw[i], 1e-10);
    }
    for (AtomId q = 0; q < t->atom_count(); ++q) {
      const auto got = localized_hl_maximal(f, q);
      const auto want = oracle::localized_hl(f, q);
      for (std::size_t i = 0; i < f.size(); ++i) mismatches += !close(got[i], want[i], 1e-10);
    }
    const StepFunction w = gen::spiky_weight(rng, t);
    const auto c = characteristics(w);
    mismatches += !close(c.a_infty_martingale, oracle::ainfty_martingale(w), 1e-10);
    mismatches += !close(c.a_infty_semiclassical, oracle::ainfty_semiclassical(w), 1e-10);
    mismatches += !close(c.a1, oracle::a1(w), 1e-10);
  };
  // Every level profile of arities 1..4 with at most 64 leaves, with equal and random splits,
  // then irregular trees whose atoms split independently.
  gen::for_each_profile(64, 6, [&](const std::vector<int>& prof) {
    check_tree(gen::profile_tree(prof, nullptr));
    check_tree(gen::profile_tree(prof, &rng));
  });
  for (int i = 0; i < 2000; ++i) check_tree(gen::irregular_tree(rng, 64, 6));

  double worst_parseval = 0.0;
  RandomTreeOptions opt;
  opt.max_depth = 8;
  opt.max_leaves = 4096;
  for (std::uint64_t seed = 1; seed <= 1000; ++seed) {
    const TreePtr t = random_tree(seed, opt);
    const StepFunction f = random_function(t, seed, seed % 2 ? FunctionModel::GaussianLeaves : FunctionModel::RandomHaar);
    const StepFunction g = f - StepFunction::constant(t, f.integral());
    const double lhs = lp_norm(g, 2.0);
    const double rhs = lp_norm(square_function(f), 2.0);
    if (rhs > 0.0) worst_parseval = std::max(worst_parseval, std::abs(lhs * lhs - rhs * rhs) / (rhs * rhs));
  }
  std::ostringstream os;
  os << trees << " trees, " << mismatches << " mismatches; Parseval worst relative error " << fmt("%.3g", worst_parseval);
  return {mismatches == 0 && worst_parseval <= 1e-9, os.str()};
}

Outcome criterion_extrapolation() {
  ExperimentConfig c = load_config(g_config);
  // The first trials of the suite are the sharpness-family inputs; 50 random phi follow.
  return run_sweep({"extrapolation"}, static_cast<int>(c.extrapolation.sharpness_alphas.size()) + 50, 0.0);
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Outcome criterion_determinism() {
  const fs::path base = fs::temp_directory_path() / ("sqfn_acceptance_" + std::to_string(::getpid()));
  double worst = 0.0;
  std::vector<std::string> csv;
  for (int run = 0; run < 2; ++run) {
    const fs::path dir = base / ("run" + std::to_string(run));
    fs::remove_all(dir);
    const auto t0 = Clock::now();
    if (!g_cli.empty()) {
      const std::string cmd = g_cli + " run " + g_config.string() + " --out " + dir.string() + " > " +
                              (base / "log.txt").string() + " 2>&1";
      fs::create_directories(base);
      const int rc = std::system(cmd.c_str());
      if (!WIFEXITED(rc) || WEXITSTATUS(rc) != 0) return {false, "run exited with status " + std::to_string(rc)};
    } else {
      ExperimentConfig c = load_config(g_config);
      c.out_dir = dir;
      write_artifacts(c, run_suites(c));
    }
    worst = std::max(worst, seconds_since(t0));
    csv.push_back(slurp(dir / "report.csv"));
  }
  fs::remove_all(base);
  const bool same = !csv[0].empty() && csv[0] == csv[1];
  std::ostringstream os;
  os << (g_cli.empty() ? "in-process" : "CLI") << " runs, " << csv[0].size() << " bytes, "
     << (same ? "identical" : "DIFFERENT") << ", slowest " << fmt("%.1f s", worst);
  return {same && worst < 300.0, os.str()};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Acceptance criteria"};
  bool strict = false;
  std::string config;
  std::vector<int> only;
  app.add_flag("--strict", strict, "Fail on known-unattainable criteria too");
  app.add_option("--cli", g_cli, "sqfn binary for the determinism criterion (default: in-process)");
  app.add_option("--config", config, "Default experiment config")->required();
  app.add_option("--only", only, "Run only these criteria");
  CLI11_PARSE(app, argc, argv);
  g_config = config;

  const std::vector<Criterion> criteria{
      {1, "Bellman sweep", criterion_bellman},
      {2, "distribution bounds", criterion_distribution},
      {3, "two-dimensional example", criterion_example_2d},
      {4, "sharpness exactness", criterion_sharpness_exact},
      {5, "sharpness asymptotics", criterion_sharpness_asymptotics},
      {6, "good-lambda", criterion_good_lambda},
      {7, "weighted and unweighted Lp", criterion_lp},
      {8, "scalar certificates", criterion_certificates},
      {9, "oracle equivalence", criterion_oracles},
      {10, "extrapolation pipeline", criterion_extrapolation},
      {11, "determinism", criterion_determinism},
  };

  int hard_failures = 0;
  for (const auto& c : criteria) {
    if (!only.empty() && std::find(only.begin(), only.end(), c.id) == only.end()) continue;
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const bool known = kKnownUnattainable.count(c.id) != 0;
    std::cout << (o.pass ? "PASS" : "FAIL") << "  " << c.id << ". " << c.title << ": " << o.detail
              << (!o.pass && known ? " [known unattainable]" : "") << std::endl;
    if (!o.pass && (strict || !known)) ++hard_failures;
  }
  return hard_failures == 0 ? 0 : 1;
}
