#include "sqfn/certificates.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <string>

#include "sqfn/error.hpp"
#include "sqfn/numeric.hpp"
#include "sqfn/parallel.hpp"
#include "sqfn/weights.hpp"

namespace sqfn {

namespace {

void require_alpha(double alpha) {
  if (!(alpha > 0.0 && alpha <= 0.5)) throw PreconditionError("alpha must lie in (0, 1/2]");
}

// Index of the largest value; ties go to the lowest index.
std::size_t argmax(const std::vector<double>& v) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < v.size(); ++i) {
    if (v[i] > v[best]) best = i;
  }
  return best;
}

}  // namespace

double bellman_U(double x, double y, double alpha) {
  require_alpha(alpha);
  if (y < 0.0) throw PreconditionError("U_alpha needs y >= 0");
  return std::exp(x - y * y / (4.0 * alpha));
}

double two_point_excess(std::span<const double> p, std::span<const double> c, double C) {
  double s = 0.0;
  for (std::size_t j = 0; j < p.size(); ++j) s += p[j] * std::expm1(c[j] - c[j] * c[j] / (4.0 * C));
  return s;
}

ScalarCertificate check_two_point_lemma(double alpha, TwoPointStrategy strategy, std::size_t grid,
                                        std::uint64_t seed) {
  require_alpha(alpha);
  if (grid < 2) throw PreconditionError("grid needs at least two points");
  ScalarCertificate cert;
  cert.params = {{"alpha", alpha}, {"grid", static_cast<double>(grid)}};
  if (strategy == TwoPointStrategy::Reduced) {
    cert.name = "twopoint-reduced";
    const double p1 = 1.0 - alpha;
    std::vector<double> vals(grid);
    parallel_for(grid, [&](std::size_t i) {
      const double c1 = 2.0 * alpha * static_cast<double>(i) / static_cast<double>(grid - 1);
      const double p[2] = {p1, alpha};
      const double c[2] = {c1, -p1 * c1 / alpha};
      vals[i] = two_point_excess(p, c, alpha);
    });
    const std::size_t k = argmax(vals);
    cert.worst_margin = vals[k];
    const double c1 = 2.0 * alpha * static_cast<double>(k) / static_cast<double>(grid - 1);
    cert.worst_location = {{"p1", p1}, {"c1", c1}, {"c2", -p1 * c1 / alpha}};
    cert.evaluations = grid;
    return cert;
  }

  cert.name = "twopoint-random";
  cert.params.emplace_back("seed", static_cast<double>(seed));
  const int max_points = static_cast<int>(std::min(6.0, std::floor(1.0 / alpha + 1e-12)));
  std::vector<double> vals(grid);
  parallel_for(grid, [&](std::size_t i) {
    std::mt19937_64 rng(trial_seed(seed, i));
    const int m = std::uniform_int_distribution<int>(2, std::max(2, max_points))(rng);
    std::exponential_distribution<double> ex(1.0);
    std::vector<double> p(static_cast<std::size_t>(m));
    std::vector<double> c(static_cast<std::size_t>(m));
    double total = 0.0;
    for (double& x : p) total += (x = ex(rng));
    const double spare = std::max(0.0, 1.0 - m * alpha);
    for (double& x : p) x = alpha + spare * x / total;
    const double scale = std::uniform_real_distribution<double>(0.0, 3.0)(rng);
    std::normal_distribution<double> nd(0.0, scale);
    double mean = 0.0;
    for (std::size_t j = 0; j < c.size(); ++j) mean += p[j] * (c[j] = nd(rng));
    for (double& x : c) x -= mean;
    vals[i] = two_point_excess(p, c, alpha);
  });
  const std::size_t k = argmax(vals);
  cert.worst_margin = vals[k];
  cert.worst_location = {{"trial", static_cast<double>(k)}};
  cert.evaluations = grid;
  return cert;
}

double dzili_excess(double n, double a) {
  const double b = n * (1.0 - a) + a;
  return (n - 1.0) * std::expm1((1.0 - a * a) / n) + std::expm1((1.0 - b * b) / n);
}

ScalarCertificate check_dzili(double n, std::size_t grid_size) {
  if (!(n >= 2.0)) throw PreconditionError("n must be >= 2");
  if (grid_size < 1000) throw PreconditionError("grid needs at least 1000 points");
  ScalarCertificate cert;
  cert.name = "dzili";
  cert.params = {{"n", n}, {"grid", static_cast<double>(grid_size)}};
  std::vector<double> vals(grid_size);
  parallel_for(grid_size, [&](std::size_t i) {
    vals[i] = dzili_excess(n, static_cast<double>(i) / static_cast<double>(grid_size - 1));
  });
  const std::size_t k = argmax(vals);
  cert.worst_margin = vals[k];
  cert.worst_location = {{"a", static_cast<double>(k) / static_cast<double>(grid_size - 1)},
                         {"value_at_1", dzili_excess(n, 1.0)}};
  cert.evaluations = grid_size;
  return cert;
}

double check_rm1(double C, double alpha) {
  require_alpha(alpha);
  if (!(C > 0.0)) throw PreconditionError("C must be positive");
  return (1.0 - alpha) * std::expm1(2.0 * alpha - C * alpha) +
         alpha * std::expm1(2.0 * (alpha - 1.0) - C * (alpha - 1.0) * (alpha - 1.0) / alpha);
}

// --- optimal C -------------------------------------------------------------

namespace {

constexpr double kTwoPointRange = 20.0;
constexpr double kViolation = 1e-15;

// Two-point configuration: mass p on c2 = t, mass 1 - p on c1 = -p t / (1 - p).
double excess_pt(double p, double t, double C) {
  const double probs[2] = {1.0 - p, p};
  const double c[2] = {-p * t / (1.0 - p), t};
  return two_point_excess(probs, c, C);
}

}  // namespace

double two_point_max_excess(double alpha, double C, std::size_t grid, double* worst_p, double* worst_c2) {
  const bool single = alpha >= 0.5 - 1e-15;
  const std::size_t np = single ? 1 : 64;
  auto p_at = [&](std::size_t i) {
    return single ? 0.5 : alpha + (0.5 - alpha) * static_cast<double>(i) / static_cast<double>(np - 1);
  };
  const double dt = 2.0 * kTwoPointRange / static_cast<double>(grid - 1);
  std::vector<double> vals(np * grid);
  parallel_for(np, [&](std::size_t i) {
    const double p = p_at(i);
    for (std::size_t j = 0; j < grid; ++j) vals[i * grid + j] = excess_pt(p, -kTwoPointRange + dt * j, C);
  });
  const std::size_t k = argmax(vals);
  double best = vals[k];
  double bp = p_at(k / grid);
  double bt = -kTwoPointRange + dt * static_cast<double>(k % grid);

  // Local stage around the coarse maximizer.
  const double dp = single ? 0.0 : (0.5 - alpha) / static_cast<double>(np - 1);
  const std::size_t side = std::max<std::size_t>(2, static_cast<std::size_t>(std::sqrt(static_cast<double>(grid))));
  const double p0 = bp;
  const double t0 = bt;
  for (std::size_t i = 0; i < (single ? 1 : side); ++i) {
    const double p = single ? 0.5
                            : std::clamp(p0 - dp + 2.0 * dp * static_cast<double>(i) / static_cast<double>(side - 1),
                                         alpha, 0.5);
    for (std::size_t j = 0; j < side; ++j) {
      const double t = t0 - dt + 2.0 * dt * static_cast<double>(j) / static_cast<double>(side - 1);
      const double v = excess_pt(p, t, C);
      if (v > best) {
        best = v;
        bp = p;
        bt = t;
      }
    }
  }
  if (worst_p) *worst_p = bp;
  if (worst_c2) *worst_c2 = bt;
  return best;
}

OptimalC optimal_C(double alpha, double tol, std::size_t grid) {
  require_alpha(alpha);
  if (!(tol > 0.0)) throw PreconditionError("tolerance must be positive");
  if (grid < 10) throw PreconditionError("grid too small");
  OptimalC out;
  double lo = 0.0;
  double hi = 1.0;
  double wp = 0.0;
  double wt = 0.0;
  if (!(two_point_max_excess(alpha, hi, grid, &wp, &wt) > kViolation)) {
    throw ResolutionError("optimal_C: no violation found at C = 1; grid too coarse (alpha = " +
                          std::to_string(alpha) + ")");
  }
  out.worst_p = wp;
  out.worst_c2 = wt;
  constexpr int kBudget = 200;
  while (hi - lo > tol) {
    if (++out.iterations > kBudget) {
      throw ResolutionError("optimal_C: bracket [" + std::to_string(lo) + ", " + std::to_string(hi) +
                            "] did not shrink below tol within the refinement budget");
    }
    const double mid = 0.5 * (lo + hi);
    if (two_point_max_excess(alpha, mid, grid, &wp, &wt) > kViolation) {
      hi = mid;
      out.worst_p = wp;
      out.worst_c2 = wt;
    } else {
      lo = mid;
    }
  }
  out.lower = lo;
  out.upper = hi;
  out.value = 0.5 * (lo + hi);
  return out;
}

// --- series and closed-form constants --------------------------------------

namespace {

double series_term(int n) {
  const double x = static_cast<double>(n);
  return std::exp(x * std::log(x / (2.0 * std::numbers::e)) - std::lgamma(x + 1.0));
}

}  // namespace

SeriesConstant superexp_constant(double truncation_eps) {
  if (!(truncation_eps > 0.0)) throw PreconditionError("truncation epsilon must be positive");
  SeriesConstant out;
  long double s = 1.0L;
  for (int n = 1;; ++n) {
    const double t = series_term(n);
    s += t;
    out.terms = n;
    out.last_term = t;
    if (t < truncation_eps) break;
  }
  // Term ratios are below 0.6 from n = 2 on, so the tail is below 1.5 times the last term.
  out.tail_bound = 1.5 * out.last_term;
  out.value = static_cast<double>(s);
  return out;
}

double superexp_constant_from(int N, double gamma, double truncation_eps) {
  if (N < 1) throw PreconditionError("N must be >= 1");
  long double s = std::exp(static_cast<long double>(gamma)) + N * static_cast<long double>(series_term(N));
  for (int n = N + 1;; ++n) {
    const double t = series_term(n);
    s += t;
    if (t < truncation_eps) break;
  }
  return static_cast<double>(s);
}

double gamma_constant(double kappa, double B, double g_sup) {
  if (!(kappa > 0.0 && B > 0.0 && g_sup > 0.0)) throw PreconditionError("kappa, B and g_sup must be positive");
  return kappa / (2.0 * std::numbers::e) * std::pow(B, -1.0 / kappa) * std::pow(g_sup, -1.0 / kappa);
}

double good_lambda_constant(double alpha, double epsilon) {
  require_alpha(alpha);
  if (!(epsilon > 0.0 && epsilon < 1.0)) throw PreconditionError("epsilon must lie in (0, 1)");
  const double a3 = alpha * alpha * alpha;
  const double q = 1.0 - 2.0 * alpha + 2.0 * alpha * alpha;
  const double e = (1.0 - epsilon) / epsilon;
  return 2.0 * std::exp(-a3 * e * e / q);
}

std::vector<NamedConstant> constant_table(double alpha, double p, double epsilon) {
  require_alpha(alpha);
  const double weighted = std::pow(2.0, 1.0 / p) * std::pow(2.0, (p + 4.0) / 2.0) * std::pow(alpha, -1.5) *
                          std::sqrt(std::log(2.0 / alpha));
  const double unweighted = 4.0 * std::pow(2.0, 1.0 / p) * std::pow(alpha, -1.5) * std::sqrt(p + 2.0);
  return {
      {"weighted_lp", weighted, "2^(1/p) 2^((p+4)/2) alpha^(-3/2) ln(2/alpha)^(1/2)"},
      {"unweighted_lp", unweighted, "4 2^(1/p) alpha^(-3/2) (p+2)^(1/2)"},
      {"good_lambda", good_lambda_constant(alpha, epsilon),
       "2 exp(-alpha^3 (1-eps)^2 / ((1-2alpha+2alpha^2) eps^2))"},
      {"superexp_series", superexp_constant(1e-15).value, "1 + sum_n (n/2e)^n / n!"},
      {"gamma_half", gamma_constant(0.5, 1.0, 1.0), "kappa/(2e) B^(-1/kappa) g^(-1/kappa) at (1/2, 1, 1)"},
  };
}

// --- moments to superexponential integrability ------------------------------

LpToSuperexp verify_lp_to_superexp(const StepFunction& f, double g_sup, double kappa, double B,
                                   std::span<const double> lambdas, int hypothesis_start) {
  if (!(kappa > 0.0 && g_sup > 0.0)) throw PreconditionError("kappa and g_sup must be positive");
  if (hypothesis_start < 1) throw PreconditionError("hypothesis start must be >= 1");
  LpToSuperexp out;
  const double fsup = f.sup_norm();
  const double alpha = f.tree().homogeneity().effective_alpha;
  constexpr int kMaxMoments = 1000000;

  // Worst ratio ||f||_p / (p^kappa g_sup) over p = n / kappa until the hypothesis
  // with the current constant is implied by ||f||_p <= ||f||_inf.
  double worst = 0.0;
  int n = hypothesis_start;
  for (; n <= kMaxMoments; ++n) {
    const double p = n / kappa;
    const double scale = std::pow(p, kappa) * g_sup;
    worst = std::max(worst, lp_norm(f, p) / scale);
    const double b = B > 0.0 ? B : worst;
    if (b * scale >= fsup) break;
  }
  out.moments_checked = n;
  out.B = B > 0.0 ? B : worst;

  InequalityReport hyp;
  hyp.name = "lp_hypothesis";
  hyp.alpha = alpha;
  hyp.lhs = worst;
  hyp.rhs = out.B;
  hyp.extras = {{"moments_checked", static_cast<double>(n)}, {"kappa", kappa}};
  finalize_strict(hyp);
  out.reports.push_back(hyp);

  out.gamma = out.B > 0.0 ? gamma_constant(kappa, out.B, g_sup) : 0.0;
  out.series = hypothesis_start == 1 ? superexp_constant(1e-15).value
                                     : superexp_constant_from(hypothesis_start, out.gamma, 1e-15);

  const auto m = f.tree().leaf_measures();
  InequalityReport integral;
  integral.name = "superexp_integral";
  integral.alpha = alpha;
  CompensatedSum acc;
  for (std::size_t i = 0; i < f.size(); ++i) acc.add(std::exp(out.gamma * std::pow(std::abs(f[i]), 1.0 / kappa)) * m[i]);
  integral.lhs = acc.value();
  integral.rhs = out.series;
  integral.extras = {{"gamma", out.gamma}, {"B", out.B}};
  finalize_strict(integral);
  out.reports.push_back(integral);

  const StepFunction absf = abs(f);
  for (double lambda : lambdas) {
    InequalityReport r;
    r.name = "superexp_markov";
    r.alpha = alpha;
    r.lambda = lambda;
    r.lhs = distribution(absf, lambda);
    r.rhs = out.series * std::exp(-out.gamma * std::pow(lambda, 1.0 / kappa));
    finalize_strict(r);
    out.reports.push_back(r);
  }
  return out;
}

// --- extrapolation weight ---------------------------------------------------

RubioWeight rubio_weight(const StepFunction& phi, double p, double c_m, int terms) {
  require_weight(phi);
  if (!(p >= 2.0) || std::isinf(p)) throw PreconditionError("rubio_weight needs 2 <= p < inf");
  if (!(c_m > 0.0)) throw PreconditionError("C_M must be positive");
  const double r = p / 2.0;
  const double r_dual = r == 1.0 ? kInfinity : r / (r - 1.0);
  const double q = c_m * p;
  constexpr int kMaxTerms = 400;

  RubioWeight out{phi, 0};
  out.norm_phi = lp_norm(phi, r_dual);
  std::vector<double> w(phi.values().begin(), phi.values().end());
  StepFunction current = phi;
  double current_norm = out.norm_phi;
  double coeff = 1.0;
  for (int n = 1;; ++n) {
    StepFunction next = hl_maximal(current);
    const double next_norm = lp_norm(next, r_dual);
    if (next_norm > 0.5 * q * current_norm * (1.0 + 1e-12)) {
      throw ResolutionError("rubio_weight: ||M^" + std::to_string(n) + " phi|| exceeds (C_M p / 2) ||M^" +
                            std::to_string(n - 1) + " phi||; C_M = " + std::to_string(c_m) + " is too small");
    }
    // `next` is M^n phi; with K = n - 1 terms summed, the slack is (C_M p)^-K ||M^(K+1) phi||_inf.
    const int k = n - 1;
    if (k >= 1) {
      const double slack = coeff * next.sup_norm();
      const double wmin = *std::min_element(w.begin(), w.end());
      const double rel = wmin > 0.0 ? slack / wmin : kInfinity;
      if (terms > 0 ? k == terms : rel < 1e-8) {
        out.terms = k;
        out.truncation_slack = slack;
        out.relative_slack = rel;
        break;
      }
    }
    if (n > kMaxTerms) throw ResolutionError("rubio_weight: truncation slack did not reach 1e-8");
    coeff /= q;
    for (std::size_t i = 0; i < w.size(); ++i) w[i] += coeff * next[i];
    current = std::move(next);
    current_norm = next_norm;
  }
  out.w = StepFunction(phi.tree_ptr(), std::move(w));
  out.norm_w = lp_norm(out.w, r_dual);
  out.a1 = a1_characteristic(out.w);
  const StepFunction mw = hl_maximal(out.w);
  double excess = -kInfinity;
  for (std::size_t i = 0; i < mw.size(); ++i) excess = std::max(excess, mw[i] - q * out.w[i]);
  out.max_pointwise_excess = excess;
  return out;
}

// --- good-lambda modification -----------------------------------------------

GoodLambdaModification good_lambda_modified(const StepFunction& f, double lambda, double epsilon, AtomId q) {
  if (!(epsilon > 0.0 && epsilon < 1.0)) throw PreconditionError("epsilon must lie in (0, 1)");
  const auto stop = stopped_function(f, lambda).stopping;
  if (std::find(stop.begin(), stop.end(), q) == stop.end()) {
    throw PreconditionError("Q is not a maximal atom with |<f>_Q| > lambda");
  }
  const FiltrationTree& t = f.tree();
  const auto atoms = t.atoms();
  const Atom& qa = t.atom(q);
  const double alpha = t.homogeneity().effective_alpha;
  const double level = epsilon * lambda;
  const auto avg = atom_averages(f);

  std::vector<double> v1(f.size(), 0.0);
  for (std::uint32_t i = qa.leaf_begin; i < qa.leaf_end; ++i) v1[i] = f[i] - avg[q];
  StepFunction f1(f.tree_ptr(), std::move(v1));
  const StepFunction s1sq = square_function_squared(f1);

  // Minimum of (S f1)^2 over each atom, bottom-up.
  std::vector<double> low(atoms.size(), kInfinity);
  for (std::size_t i = atoms.size(); i-- > 0;) {
    const Atom& a = atoms[i];
    if (a.is_leaf()) {
      low[i] = s1sq[a.leaf_begin];
    } else {
      for (std::uint32_t c = 0; c < a.child_count; ++c) low[i] = std::min(low[i], low[a.first_child + c]);
    }
  }

  GoodLambdaModification out{f1, f1, f1, {}, {}};
  std::vector<char> inside(atoms.size(), 0);  // atom lies in some R
  std::vector<char> is_r(atoms.size(), 0);
  for (std::size_t i = 0; i < atoms.size(); ++i) {
    const auto id = static_cast<AtomId>(i);
    if (!t.contains(q, id)) continue;
    if (id != q && inside[atoms[i].parent]) {
      inside[i] = 1;
    } else if (low[i] >= level * level) {
      inside[i] = is_r[i] = 1;
      out.stopping.push_back(id);
    }
  }

  // f2 and f3: sums of the kept differences along each path inside Q.
  std::vector<double> val2(atoms.size(), 0.0);
  std::vector<double> val3(atoms.size(), 0.0);
  double mean_error = 0.0;
  for (std::size_t i = 0; i < atoms.size(); ++i) {
    const Atom& a = atoms[i];
    if (a.child_count == 0 || !t.contains(q, static_cast<AtomId>(i))) continue;
    if (inside[i]) {
      for (std::uint32_t c = 0; c < a.child_count; ++c) {
        val2[a.first_child + c] = val2[i];
        val3[a.first_child + c] = val3[i];
      }
      continue;
    }
    double r_mass = 0.0;
    double r_sum = 0.0;
    for (std::uint32_t c = 0; c < a.child_count; ++c) {
      const AtomId cid = a.first_child + c;
      if (is_r[cid]) {
        r_mass += atoms[cid].fraction;
        r_sum += atoms[cid].fraction * (avg[cid] - avg[i]);
      }
    }
    const bool modify = r_mass > 0.0;
    if (modify) out.modified.push_back(static_cast<AtomId>(i));
    double mean = 0.0;
    for (std::uint32_t c = 0; c < a.child_count; ++c) {
      const AtomId cid = a.first_child + c;
      const double d = avg[cid] - avg[i];
      const double d3 = modify && is_r[cid] ? r_sum / r_mass : d;
      mean += atoms[cid].fraction * d3;
      val2[cid] = val2[i] + d;
      val3[cid] = val3[i] + d3;
    }
    if (modify) mean_error = std::max(mean_error, std::abs(mean));
  }
  std::vector<double> v2(f.size(), 0.0);
  std::vector<double> v3(f.size(), 0.0);
  for (std::uint32_t i = qa.leaf_begin; i < qa.leaf_end; ++i) {
    v2[i] = val2[t.leaf_atom(i)];
    v3[i] = val3[t.leaf_atom(i)];
  }
  out.f2 = StepFunction(f.tree_ptr(), std::move(v2));
  out.f3 = StepFunction(f.tree_ptr(), std::move(v3));
  out.max_mean_error = mean_error;

  const StepFunction s2 = square_function(out.f2);
  const StepFunction s3sq = square_function_squared(out.f3);
  const double scale = std::max(1.0, f.sup_norm());
  out.agree_outside = true;
  for (std::size_t i = 0; i < f.size(); ++i) {
    if (inside[t.leaf_atom(i)]) continue;
    if (std::abs(out.f2[i] - out.f3[i]) > 1e-10 * scale || std::abs(s2[i] - std::sqrt(s3sq[i])) > 1e-10 * scale) {
      out.agree_outside = false;
    }
  }
  out.sup_sf3_squared = std::max(0.0, s3sq.max());
  out.sf3_bound = level * level * (1.0 - 2.0 * alpha + 2.0 * alpha * alpha) / (alpha * alpha);

  const StepFunction fstar = maximal_function(f);
  const StepFunction s = square_function(f);
  const StepFunction f3star = maximal_function(out.f3);
  out.contains_e_q = true;
  for (std::uint32_t i = qa.leaf_begin; i < qa.leaf_end; ++i) {
    if (!(fstar[i] > 2.0 * lambda && s[i] <= level)) continue;
    if (!(f3star[i] > (1.0 - epsilon) * lambda && std::sqrt(s3sq[i]) <= level * (1.0 + 1e-12))) {
      out.contains_e_q = false;
    }
  }
  return out;
}

}  // namespace sqfn
