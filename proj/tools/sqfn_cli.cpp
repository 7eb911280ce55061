// Command-line driver. Exit codes: 0 success, 1 a verifier or certificate
// failed, 2 bad usage, config or input.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>

#include "sqfn/certificates.hpp"
#include "sqfn/config.hpp"
#include "sqfn/constructions.hpp"
#include "sqfn/inequalities.hpp"
#include "sqfn/json_io.hpp"
#include "sqfn/random.hpp"
#include "sqfn/runner.hpp"
#include "sqfn/weights.hpp"

using namespace sqfn;

namespace {

struct Common {
  std::uint64_t seed = 1;
  std::string out;
  std::string format = "json";
};

void add_common(CLI::App* app, Common& c, const char* default_format) {
  c.format = default_format;
  app->add_option("--seed", c.seed, "Random seed");
  app->add_option("--out", c.out, "Output file (default: stdout)");
  app->add_option("--format", c.format, "Output format")->check(CLI::IsMember({"csv", "json"}));
}

void emit(const Common& c, const std::string& text) {
  if (c.out.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream os(c.out, std::ios::binary);
  if (!os) throw PreconditionError("cannot write " + c.out);
  os << text;
}

std::string function_csv(const StepFunction& f) {
  std::ostringstream os;
  os << "leaf,measure,value\n";
  for (std::size_t i = 0; i < f.size(); ++i) {
    os << i << ',' << format_double(f.tree().leaf_measures()[i]) << ',' << format_double(f[i]) << '\n';
  }
  return os.str();
}

std::string function_text(const Common& c, const StepFunction& f) {
  return c.format == "csv" ? function_csv(f) : function_to_json(f).dump(2) + "\n";
}

std::string reports_text(const Common& c, const std::vector<InequalityReport>& reports) {
  if (c.format == "json") {
    Json j = Json::array();
    for (const auto& r : reports) j.push_back(report_to_json(r));
    return j.dump(2) + "\n";
  }
  std::ostringstream os;
  write_csv(os, reports);
  return os.str();
}

// --- gen ---------------------------------------------------------------------

struct GenArgs {
  Common common;
  std::string what;
  int nadic = 0;
  int depth = 0;
  bool exact = false;
  std::string tree;
  std::string model = "random-haar-coefficients";
  double scale = 4.0;
  double alpha_min = 0.05;
  double alpha_max = 0.5;
};

int run_gen(const GenArgs& a) {
  if (a.what == "tree") {
    TreePtr t;
    if (a.nadic > 0) {
      if (a.depth < 1) throw PreconditionError("--depth is required with --nadic");
      t = build_nadic(a.nadic, a.depth, a.exact);
    } else {
      RandomTreeOptions opt;
      opt.alpha_min = a.alpha_min;
      opt.alpha_max = a.alpha_max;
      if (a.depth > 0) opt.max_depth = a.depth;
      t = random_tree(a.common.seed, opt);
    }
    emit(a.common, tree_to_json(*t).dump(2) + "\n");
    return 0;
  }
  if (a.tree.empty()) throw PreconditionError("gen fn needs --tree");
  TreePtr t = tree_from_json(read_json_file(a.tree));
  emit(a.common, function_text(a.common, random_function(t, a.common.seed, parse_model(a.model), a.scale)));
  return 0;
}

// --- op ----------------------------------------------------------------------

struct OpArgs {
  Common common;
  std::string fn;
  std::string op;
  double p = 2.0;
  double lambda = 1.0;
};

int run_op(const OpArgs& a) {
  const StepFunction f = load_function(a.fn);
  std::optional<StepFunction> out;
  if (a.op == "square") out = square_function(f);
  if (a.op == "maximal") out = maximal_function(f);
  if (a.op == "sp") out = square_function_p(f, a.p);
  if (a.op == "sinf") out = square_function_p(f, kInfinity);
  if (a.op == "hl") out = hl_maximal(f);
  if (a.op == "stopped") out = stopped_function(f, a.lambda).f;
  if (out) {
    emit(a.common, function_text(a.common, *out));
    return 0;
  }
  double v = 0.0;
  if (a.op == "distribution") v = distribution(f, a.lambda);
  if (a.op == "norm") v = lp_norm(f, a.p);
  if (a.op == "mean") v = f.integral();
  if (a.common.format == "csv") {
    emit(a.common, "op,value\n" + a.op + "," + format_double(v) + "\n");
  } else {
    emit(a.common, Json({{"op", a.op}, {"value", v}}).dump(2) + "\n");
  }
  return 0;
}

// --- weight ------------------------------------------------------------------

struct WeightArgs {
  Common common;
  std::string fn;
  std::string characteristic = "all";
};

int run_weight(const WeightArgs& a) {
  const StepFunction w = load_function(a.fn);
  require_weight(w);
  std::vector<std::pair<std::string, double>> rows;
  const auto& c = a.characteristic;
  if (c == "martingale" || c == "all") rows.emplace_back("martingale", ainfty_martingale(w));
  if (c == "semiclassical" || c == "all") rows.emplace_back("semiclassical", ainfty_semiclassical(w));
  if (c == "a1" || c == "all") rows.emplace_back("a1", a1_characteristic(w));
  if (a.common.format == "csv") {
    std::ostringstream os;
    os << "characteristic,value\n";
    for (const auto& [k, v] : rows) os << k << ',' << format_double(v) << '\n';
    emit(a.common, os.str());
  } else {
    Json j;
    for (const auto& [k, v] : rows) j[k] = std::isinf(v) ? Json("inf") : Json(v);
    emit(a.common, j.dump(2) + "\n");
  }
  return 0;
}

// --- verify ------------------------------------------------------------------

struct VerifyArgs {
  Common common;
  std::string suite = "all";
  int trials = 1000;
  std::string config;
};

std::vector<std::string> verify_suites(const std::string& s) {
  if (s == "bellman") return {"bellman", "moment"};
  if (s == "distribution") return {"distribution", "maximal", "cww"};
  if (s == "goodlambda") return {"goodlambda", "modification"};
  if (s == "weighted") return {"weighted", "unweighted", "w_of_e", "ratios"};
  return {"bellman", "moment",   "distribution", "maximal", "cww",    "goodlambda",
          "modification", "weighted", "unweighted", "w_of_e", "ratios"};
}

void print_failures(const RunResult& r) {
  for (const auto& line : r.failures) std::cerr << "FAIL " << line << '\n';
}

int run_verify(const VerifyArgs& a) {
  ExperimentConfig cfg = a.config.empty() ? ExperimentConfig{} : load_config(a.config);
  cfg.seed = a.common.seed;
  cfg.trials = a.trials;
  if (cfg.trials < 1) throw ConfigError("--trials must be positive");
  cfg.suites = verify_suites(a.suite);
  const RunResult r = run_suites(cfg);
  emit(a.common, reports_text(a.common, r.reports));
  for (const auto& s : r.suites) {
    std::cerr << s.name << ": " << s.rows << " rows, " << s.failures << " failed, " << s.degenerate << " degenerate\n";
  }
  print_failures(r);
  return r.exit_code();
}

// --- certify -----------------------------------------------------------------

struct CertifyArgs {
  Common common;
  std::string name;
  double alpha = 0.25;
  double n = 2;
  std::size_t grid = 0;  // 0: 100000 points, 1000 for optimalC
  double c = 1.0;
  double eps = 1e-15;
  std::string strategy = "reduced";
};

int run_certify(const CertifyArgs& a) {
  const std::size_t grid = a.grid > 0 ? a.grid : (a.name == "optimalC" ? 1000 : 100000);
  Json j;
  int code = 0;
  if (a.name == "dzili" || a.name == "twopoint" || a.name == "rm1") {
    ScalarCertificate cert;
    if (a.name == "dzili") {
      cert = check_dzili(a.n, grid);
    } else if (a.name == "twopoint") {
      const auto s = a.strategy == "random" ? TwoPointStrategy::Random : TwoPointStrategy::Reduced;
      cert = check_two_point_lemma(a.alpha, s, grid, a.common.seed);
    } else {
      cert.name = "rm1";
      cert.params = {{"C", a.c}, {"alpha", a.alpha}};
      cert.worst_margin = check_rm1(a.c, a.alpha);
      cert.worst_location = cert.params;
      cert.evaluations = 1;
    }
    j = certificate_to_json(cert);
    code = cert.certified() ? 0 : 1;
  } else if (a.name == "optimalC") {
    const OptimalC c = optimal_C(a.alpha, 1e-6, grid);
    j = {{"name", "optimal_C"}, {"alpha", a.alpha}, {"value", c.value}, {"lower", c.lower},
         {"upper", c.upper},    {"iterations", c.iterations}};
  } else if (a.name == "series") {
    const SeriesConstant s = superexp_constant(a.eps);
    j = {{"name", "series"},        {"eps", a.eps},        {"value", s.value},
         {"terms", s.terms},        {"last_term", s.last_term}, {"tail_bound", s.tail_bound}};
  } else {
    throw PreconditionError("unknown certificate '" + a.name + "'");
  }
  if (a.common.format == "csv") {
    std::ostringstream head;
    std::ostringstream row;
    bool first = true;
    for (const auto& [k, v] : j.items()) {
      if (v.is_object()) continue;
      head << (first ? "" : ",") << k;
      row << (first ? "" : ",") << (v.is_string() ? v.get<std::string>() : v.dump());
      first = false;
    }
    emit(a.common, head.str() + "\n" + row.str() + "\n");
  } else {
    emit(a.common, j.dump(2) + "\n");
  }
  return code;
}

// --- construct ---------------------------------------------------------------

struct ConstructArgs {
  Common common;
  std::string which;
  double alpha = 0.0625;
  int N = 0;
  double lambda = 0.0;
  int k = 10;
};

int run_construct(const ConstructArgs& a) {
  if (a.which == "example2d") {
    emit(a.common, function_text(a.common, build_example_2d(a.k)));
  } else if (a.which == "sharpness") {
    const int n = a.N > 0 ? a.N : static_cast<int>(std::ceil(2.0 / (a.alpha * a.alpha) - 1e-9));
    emit(a.common, function_text(a.common, build_sharpness(a.alpha, n).g));
  } else {
    if (!(a.lambda > 0.0)) throw PreconditionError("flambda needs --lambda > 0");
    emit(a.common, function_text(a.common, *build_f_lambda(a.alpha, a.lambda).f_lambda));
  }
  return 0;
}

// --- run ---------------------------------------------------------------------

struct RunArgs {
  std::string config;
  std::string out;
};

int run_run(const RunArgs& a) {
  ExperimentConfig cfg = load_config(a.config);
  if (!a.out.empty()) cfg.out_dir = a.out;
  const RunResult r = run_suites(cfg);
  write_artifacts(cfg, r);
  for (const auto& s : r.suites) {
    std::cout << s.name << ": " << s.rows << " rows, " << s.failures << " failed, " << s.degenerate
              << " degenerate\n";
  }
  if (r.has_sharpness) {
    std::cout << "sharpness: lambda0 = " << format_double(r.sharpness.lambda0) << " (" << r.sharpness.above_lambda0
              << " tested lambdas at or above it)\n";
  }
  std::cout << r.suites.size() << " suites, " << r.failures.size() << " failures\n";
  print_failures(r);
  return r.exit_code();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Square functions, maximal functions and their inequalities on atomic filtrations"};
  app.require_subcommand(1);

  GenArgs gen;
  auto* g = app.add_subcommand("gen", "Generate a tree or a random function");
  g->add_option("what", gen.what, "tree or fn")->required()->check(CLI::IsMember({"tree", "fn"}));
  g->add_option("--nadic", gen.nadic, "Arity of a homogeneous n-adic tree");
  g->add_option("--depth", gen.depth, "Depth (n-adic) or maximal depth (random)");
  g->add_flag("--exact", gen.exact, "Attach exact rational measures");
  g->add_option("--tree", gen.tree, "Tree JSON for gen fn");
  g->add_option("--model", gen.model, "gaussian-leaves, random-haar-coefficients or spike");
  g->add_option("--scale", gen.scale, "Model scale");
  g->add_option("--alpha-min", gen.alpha_min);
  g->add_option("--alpha-max", gen.alpha_max);
  add_common(g, gen.common, "json");

  OpArgs op;
  auto* o = app.add_subcommand("op", "Apply an operator to a function");
  o->add_option("--fn", op.fn, "Function JSON")->required();
  o->add_option("--op", op.op, "Operator")
      ->required()
      ->check(CLI::IsMember({"square", "maximal", "sp", "sinf", "hl", "stopped", "distribution", "norm", "mean"}));
  o->add_option("--p", op.p, "Exponent for sp and norm");
  o->add_option("--lambda", op.lambda, "Level for stopped and distribution");
  add_common(o, op.common, "json");

  WeightArgs wt;
  auto* w = app.add_subcommand("weight", "Weight characteristics");
  w->add_option("--fn", wt.fn, "Weight JSON")->required();
  w->add_option("--char", wt.characteristic, "Characteristic")
      ->check(CLI::IsMember({"martingale", "semiclassical", "a1", "all"}));
  add_common(w, wt.common, "json");

  VerifyArgs vf;
  auto* v = app.add_subcommand("verify", "Randomized inequality sweeps");
  v->add_option("--suite", vf.suite)->check(CLI::IsMember({"all", "bellman", "distribution", "goodlambda", "weighted"}));
  v->add_option("--trials", vf.trials);
  v->add_option("--config", vf.config, "Take tree, function and grid settings from a config file");
  add_common(v, vf.common, "csv");

  CertifyArgs ct;
  auto* c = app.add_subcommand("certify", "Scalar certificates and constants");
  c->add_option("--name", ct.name)->required()->check(CLI::IsMember({"dzili", "twopoint", "rm1", "optimalC", "series"}));
  c->add_option("--alpha", ct.alpha);
  c->add_option("--n", ct.n);
  c->add_option("--grid", ct.grid);
  c->add_option("--C", ct.c, "C for rm1");
  c->add_option("--eps", ct.eps, "Truncation for series");
  c->add_option("--strategy", ct.strategy)->check(CLI::IsMember({"reduced", "random"}));
  add_common(c, ct.common, "json");

  ConstructArgs cs;
  auto* k = app.add_subcommand("construct", "Explicit example functions");
  k->add_option("--which", cs.which)->required()->check(CLI::IsMember({"example2d", "sharpness", "flambda"}));
  k->add_option("--alpha", cs.alpha);
  k->add_option("--N", cs.N);
  k->add_option("--lambda", cs.lambda);
  k->add_option("--k", cs.k, "Generations of the two-dimensional example");
  add_common(k, cs.common, "json");

  RunArgs rn;
  auto* r = app.add_subcommand("run", "Run an experiment config");
  r->add_option("config", rn.config, "TOML config")->required();
  r->add_option("--out", rn.out, "Output directory (overrides output.dir)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*g) return run_gen(gen);
    if (*o) return run_op(op);
    if (*w) return run_weight(wt);
    if (*v) return run_verify(vf);
    if (*c) return run_certify(ct);
    if (*k) return run_construct(cs);
    if (*r) return run_run(rn);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 2;
}
