#include "sqfn/inequalities.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "sqfn/error.hpp"
#include "sqfn/kernels.hpp"
#include "sqfn/numeric.hpp"
#include "sqfn/weights.hpp"

namespace sqfn {

namespace {

constexpr double kOverflowGuard = 700.0;

double alpha_of(const StepFunction& f) { return f.tree().homogeneity().effective_alpha; }

InequalityReport make(const char* name, const StepFunction& f) {
  InequalityReport r;
  r.name = name;
  r.alpha = alpha_of(f);
  return r;
}

double sup_square(const StepFunction& s2) { return std::max(s2.max(), 0.0); }

// |{f - E f > lambda}|
double centered_distribution(const StepFunction& f, double lambda) {
  const double mean = f.integral();
  std::vector<double> c(f.values().begin(), f.values().end());
  for (double& v : c) v -= mean;
  return kernels::masked_measure(c, f.tree().leaf_measures(), lambda);
}

void require_lambdas(std::span<const double> lambdas) {
  for (double l : lambdas) {
    if (!(l > 0.0)) throw PreconditionError("lambda must be positive");
  }
}

// Sets lhs = sum_i m_i exp(x_i) and rhs = exp(log_rhs); both are rescaled by a
// common factor when either exponent would overflow.
void exp_sum_report(InequalityReport& r, const std::vector<double>& x, const FiltrationTree& t, double log_rhs) {
  const double xmax = kernels::max_value(x);
  if (xmax <= kOverflowGuard && log_rhs <= kOverflowGuard) {
    r.lhs = kernels::exp_weighted_sum(x, t.leaf_measures(), 0.0);
    r.rhs = std::exp(log_rhs);
    return;
  }
  LogSumExp acc;
  const auto logm = t.leaf_log_measures();
  for (std::size_t i = 0; i < x.size(); ++i) acc.add(x[i] + logm[i]);
  const double log_lhs = acc.value();
  const double shift = std::max(log_lhs, log_rhs);
  r.lhs = std::exp(log_lhs - shift);
  r.rhs = std::exp(log_rhs - shift);
  r.extras.emplace_back("log_scale", shift);
  r.note = "lhs and rhs scaled by exp(-log_scale)";
}

}  // namespace

bool is_centered(const StepFunction& f) { return std::abs(f.integral()) <= 1e-12 * std::max(1.0, f.sup_norm()); }

InequalityReport verify_exp_bellman(const StepFunction& f) {
  InequalityReport r = make("exp_bellman", f);
  const StepFunction s2 = square_function_squared(f);
  std::vector<double> x(f.size());
  for (std::size_t i = 0; i < x.size(); ++i) x[i] = f[i] - s2[i] / (4.0 * r.alpha);
  exp_sum_report(r, x, f.tree(), f.integral());
  finalize_strict(r);
  return r;
}

InequalityReport verify_exp_moment(const StepFunction& f) {
  InequalityReport r = make("exp_moment", f);
  const double mean = f.integral();
  const double s2max = sup_square(square_function_squared(f));
  std::vector<double> x(f.size());
  for (std::size_t i = 0; i < x.size(); ++i) x[i] = f[i] - mean;
  exp_sum_report(r, x, f.tree(), s2max / (4.0 * r.alpha));
  r.extras.emplace_back("sup_Sf", std::sqrt(s2max));
  finalize_strict(r);
  return r;
}

std::vector<InequalityReport> verify_superexp_distribution(const StepFunction& f, std::span<const double> lambdas) {
  require_lambdas(lambdas);
  const double s2max = sup_square(square_function_squared(f));
  std::vector<InequalityReport> out;
  for (double lambda : lambdas) {
    InequalityReport r = make("superexp_distribution", f);
    r.lambda = lambda;
    r.lhs = centered_distribution(f, lambda);
    r.rhs = s2max > 0.0 ? std::exp(-r.alpha * lambda * lambda / s2max) : 0.0;
    r.extras.emplace_back("sup_Sf", std::sqrt(s2max));
    finalize_strict(r);
    out.push_back(std::move(r));
  }
  return out;
}

std::vector<InequalityReport> verify_superexp_maximal(const StepFunction& f, std::span<const double> lambdas) {
  require_lambdas(lambdas);
  if (!is_centered(f)) throw PreconditionError("maximal distribution bound requires E f = 0");
  const double s2max = sup_square(square_function_squared(f));
  const StepFunction fstar = maximal_function(f);
  std::vector<InequalityReport> out;
  for (double lambda : lambdas) {
    InequalityReport r = make("superexp_maximal", f);
    r.lambda = lambda;
    r.lhs = distribution(fstar, lambda);
    r.rhs = s2max > 0.0 ? 2.0 * std::exp(-r.alpha * lambda * lambda / s2max) : 0.0;
    r.extras.emplace_back("sup_Sf", std::sqrt(s2max));
    finalize_strict(r);
    out.push_back(std::move(r));
  }
  return out;
}

double weighted_lp_constant(double alpha, double p) {
  return std::pow(2.0, 1.0 / p) * std::pow(2.0, (p + 4.0) / 2.0) * std::pow(alpha, -1.5) *
         std::sqrt(std::log(2.0 / alpha));
}

double unweighted_lp_constant(double alpha, double p) {
  return 4.0 * std::pow(2.0, 1.0 / p) * std::pow(alpha, -1.5) * std::sqrt(p + 2.0);
}

namespace {

void require_exponent(double p) {
  if (!(p > 0.0) || std::isinf(p)) throw PreconditionError("Lp exponent must lie in (0, inf)");
}

void flag_hypotheses(InequalityReport& r, const StepFunction& f, const StepFunction& s) {
  if (s.max() == 0.0 && r.lhs > 0.0) {
    mark_degenerate(r, "degenerate: Sf == 0");
  } else if (!is_centered(f)) {
    mark_degenerate(r, "degenerate: nonzero mean");
  }
}

}  // namespace

InequalityReport verify_weighted_lower_bound(const StepFunction& f, const StepFunction& w, double p) {
  require_same_tree(f, w);
  require_exponent(p);
  require_weight(w);
  InequalityReport r = make("weighted_lp", f);
  r.p = p;
  const double a_inf = ainfty_martingale(w);
  const double c = weighted_lp_constant(r.alpha, p);
  const StepFunction s = square_function(f);
  r.lhs = weighted_lp_norm(maximal_function(f), w, p);
  r.rhs = c * std::sqrt(a_inf) * weighted_lp_norm(s, w, p);
  r.extras.emplace_back("a_infty", a_inf);
  r.extras.emplace_back("constant", c);
  finalize_strict(r);
  flag_hypotheses(r, f, s);
  return r;
}

InequalityReport verify_unweighted_lp(const StepFunction& f, double p) {
  require_exponent(p);
  InequalityReport r = make("unweighted_lp", f);
  r.p = p;
  const double c = unweighted_lp_constant(r.alpha, p);
  const StepFunction s = square_function(f);
  r.lhs = lp_norm(maximal_function(f), p);
  r.rhs = c * lp_norm(s, p);
  r.extras.emplace_back("constant", c);
  finalize_strict(r);
  flag_hypotheses(r, f, s);
  return r;
}

std::vector<InequalityReport> verify_good_lambda(const StepFunction& f, double lambda, double epsilon) {
  if (!(lambda > 0.0)) throw PreconditionError("lambda must be positive");
  if (!(epsilon > 0.0 && epsilon < 1.0)) throw PreconditionError("epsilon must lie in (0, 1)");
  const FiltrationTree& t = f.tree();
  const double alpha = alpha_of(f);
  const double factor = 2.0 * std::exp(-alpha * alpha * alpha * (1.0 - epsilon) * (1.0 - epsilon) /
                                       ((1.0 - 2.0 * alpha + 2.0 * alpha * alpha) * epsilon * epsilon));
  const auto stopping = stopped_function(f, lambda).stopping;
  const StepFunction fstar = maximal_function(f);
  const StepFunction s = square_function(f);
  const auto m = t.leaf_measures();
  std::vector<InequalityReport> out;
  for (AtomId q : stopping) {
    const Atom& a = t.atom(q);
    InequalityReport r = make("good_lambda", f);
    r.lambda = lambda;
    r.epsilon = epsilon;
    double lhs = 0.0;
    for (std::uint32_t i = a.leaf_begin; i < a.leaf_end; ++i) {
      if (fstar[i] > 2.0 * lambda && s[i] <= epsilon * lambda) lhs += m[i];
    }
    r.lhs = lhs;
    r.rhs = factor * a.measure;
    r.extras.emplace_back("atom", static_cast<double>(q));
    r.extras.emplace_back("factor", factor);
    finalize_strict(r);
    out.push_back(std::move(r));
  }
  return out;
}

InequalityReport verify_w_of_E(const StepFunction& w, AtomId q0, std::span<const AtomId> e) {
  require_weight(w);
  const FiltrationTree& t = w.tree();
  const Atom& root = t.atom(q0);
  std::vector<char> in_e(t.leaf_count(), 0);
  for (AtomId id : e) {
    const Atom& a = t.atom(id);
    if (!t.contains(q0, id)) throw PreconditionError("E must consist of atoms inside Q0");
    std::fill(in_e.begin() + a.leaf_begin, in_e.begin() + a.leaf_end, 1);
  }
  const auto m = t.leaf_measures();
  double e_measure = 0.0;
  double w_e = 0.0;
  double w_q0 = 0.0;
  for (std::uint32_t i = root.leaf_begin; i < root.leaf_end; ++i) {
    w_q0 += w[i] * m[i];
    if (in_e[i]) {
      e_measure += m[i];
      w_e += w[i] * m[i];
    }
  }
  if (e_measure >= root.measure * (1.0 - 1e-14)) throw PreconditionError("|E| must be smaller than |Q0|");

  InequalityReport r = make("w_of_E", w);
  std::vector<double> restricted(w.size(), 0.0);
  std::copy(w.values().begin() + root.leaf_begin, w.values().begin() + root.leaf_end,
            restricted.begin() + root.leaf_begin);
  const StepFunction wstar = maximal_function(StepFunction(w.tree_ptr(), std::move(restricted)));
  double num = 0.0;
  for (std::uint32_t i = root.leaf_begin; i < root.leaf_end; ++i) num += wstar[i] * m[i];
  r.lhs = w_e;
  if (w_q0 > 0.0 && e_measure > 0.0) {
    const double a_const = num / w_q0;
    r.rhs = 2.0 * a_const * std::log(2.0 / r.alpha) / std::log(root.measure / e_measure) * w_q0;
    r.extras.emplace_back("A", a_const);
  } else {
    r.rhs = 0.0;
  }
  r.extras.emplace_back("E_measure", e_measure);
  finalize_strict(r);
  return r;
}

std::vector<InequalityReport> verify_cww_sinf(const StepFunction& f, std::span<const double> lambdas) {
  require_lambdas(lambdas);
  const double sinf = square_function_p(f, kInfinity).max();
  std::vector<InequalityReport> out;
  for (double lambda : lambdas) {
    InequalityReport r = make("cww_sinf", f);
    r.lambda = lambda;
    r.lhs = centered_distribution(f, lambda);
    r.rhs = sinf > 0.0 ? std::exp(-lambda * lambda / (2.0 * sinf * sinf)) : 0.0;
    r.extras.emplace_back("sup_Sinf", sinf);
    finalize_strict(r);
    out.push_back(std::move(r));
  }
  return out;
}

InequalityReport verify_wilson_ratio(const StepFunction& f, const StepFunction& w, double p) {
  require_same_tree(f, w);
  require_exponent(p);
  require_weight(w);
  InequalityReport r = make("wilson_ratio", f);
  r.p = p;
  const double a_inf = ainfty_martingale(w);
  r.lhs = std::pow(weighted_lp_norm(maximal_function(f), w, p), p);
  r.rhs = std::pow(a_inf, p / 2.0) * std::pow(weighted_lp_norm(square_function_p(f, kInfinity), w, p), p);
  r.extras.emplace_back("a_infty", a_inf);
  finalize_ratio(r);
  return r;
}

InequalityReport verify_diptv_ratio(const StepFunction& f, const StepFunction& w) {
  require_same_tree(f, w);
  require_weight(w);
  InequalityReport r = make("diptv_ratio", f);
  r.p = 2.0;
  const double scl = ainfty_semiclassical(w);
  r.lhs = weighted_lp_norm(f, w, 2.0);
  r.rhs = std::sqrt(scl) / r.alpha * weighted_lp_norm(square_function(f), w, 2.0);
  r.extras.emplace_back("a_infty_scl", scl);
  finalize_ratio(r);
  return r;
}

InequalityReport verify_diptv_martingale_ratio(const StepFunction& f, const StepFunction& w) {
  require_same_tree(f, w);
  require_weight(w);
  InequalityReport r = make("diptv_martingale_ratio", f);
  r.p = 2.0;
  const double a_inf = ainfty_martingale(w);
  r.lhs = weighted_lp_norm(f, w, 2.0);
  r.rhs = std::pow(r.alpha, -1.5) * std::sqrt(a_inf) * weighted_lp_norm(square_function(f), w, 2.0);
  r.extras.emplace_back("a_infty", a_inf);
  finalize_ratio(r);
  return r;
}

InequalityReport verify_ainfty_scl_ratio(const StepFunction& w) {
  InequalityReport r = make("ainfty_scl_ratio", w);
  const double a_inf = ainfty_martingale(w);
  r.lhs = ainfty_semiclassical(w);
  r.rhs = a_inf / r.alpha;
  r.extras.emplace_back("a_infty", a_inf);
  finalize_ratio(r);
  return r;
}

}  // namespace sqfn
