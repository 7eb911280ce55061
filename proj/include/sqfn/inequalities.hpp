#pragma once

// Numerical checks of the inequalities relating f, S f, S_inf f, f* and A_inf
// weights. Strict-bound verifiers produce pass/fail reports; statements with
// unspecified constants are reported as ratios only. The homogeneity
// parameter used everywhere is the tree's effective alpha = min(alpha, 1/2).

#include <span>
#include <vector>

#include "sqfn/operators.hpp"
#include "sqfn/report.hpp"

namespace sqfn {

/// E exp(f - (Sf)^2 / 4 alpha) <= exp(E f).
[[nodiscard]] InequalityReport verify_exp_bellman(const StepFunction& f);

/// E exp(f - E f) <= exp(||Sf||_inf^2 / 4 alpha).
[[nodiscard]] InequalityReport verify_exp_moment(const StepFunction& f);

/// |{f - E f > lambda}| <= exp(-alpha lambda^2 / ||Sf||_inf^2), one report per lambda.
[[nodiscard]] std::vector<InequalityReport> verify_superexp_distribution(const StepFunction& f,
                                                                         std::span<const double> lambdas);

/// |{f* > lambda}| <= 2 exp(-alpha lambda^2 / ||Sf||_inf^2); requires E f = 0.
[[nodiscard]] std::vector<InequalityReport> verify_superexp_maximal(const StepFunction& f,
                                                                    std::span<const double> lambdas);

/// C(alpha, p) = 2^(1/p) 2^((p+4)/2) alpha^(-3/2) ln(2/alpha)^(1/2).
[[nodiscard]] double weighted_lp_constant(double alpha, double p);

/// 4 2^(1/p) alpha^(-3/2) (p+2)^(1/2).
[[nodiscard]] double unweighted_lp_constant(double alpha, double p);

/// ||f*||_{L^p(w)} <= C(alpha, p) [w]_{A_inf}^(1/2) ||Sf||_{L^p(w)}.
[[nodiscard]] InequalityReport verify_weighted_lower_bound(const StepFunction& f, const StepFunction& w, double p);

/// ||f*||_p <= 4 2^(1/p) alpha^(-3/2) (p+2)^(1/2) ||Sf||_p.
[[nodiscard]] InequalityReport verify_unweighted_lp(const StepFunction& f, double p);

/// Per maximal atom Q with |<f>_Q| > lambda:
/// |{x in Q : f* > 2 lambda, Sf <= eps lambda}| <= 2 exp(-alpha^3 (1-eps)^2 / ((1-2alpha+2alpha^2) eps^2)) |Q|.
[[nodiscard]] std::vector<InequalityReport> verify_good_lambda(const StepFunction& f, double lambda, double epsilon);

/// w(E) <= 2 A ln(2/alpha) / ln(|Q0|/|E|) w(Q0), E a union of atoms inside Q0 and
/// A = <(1_{Q0} w)*>_{Q0} / <w>_{Q0}.
[[nodiscard]] InequalityReport verify_w_of_E(const StepFunction& w, AtomId q0, std::span<const AtomId> e);

/// |{f - E f > lambda}| <= exp(-lambda^2 / (2 ||S_inf f||_inf^2)); any tree.
[[nodiscard]] std::vector<InequalityReport> verify_cww_sinf(const StepFunction& f, std::span<const double> lambdas);

/// Ratio  int (f*)^p w  /  ([w]_{A_inf}^(p/2) int (S_inf f)^p w).
[[nodiscard]] InequalityReport verify_wilson_ratio(const StepFunction& f, const StepFunction& w, double p);

/// Ratio  ||f||_{L^2(w)}  /  (alpha^-1 [w]_scl^(1/2) ||Sf||_{L^2(w)}).
[[nodiscard]] InequalityReport verify_diptv_ratio(const StepFunction& f, const StepFunction& w);

/// Ratio  ||f||_{L^2(w)}  /  (alpha^-3/2 [w]_{A_inf}^(1/2) ||Sf||_{L^2(w)}).
[[nodiscard]] InequalityReport verify_diptv_martingale_ratio(const StepFunction& f, const StepFunction& w);

/// Ratio  [w]_scl / (alpha^-1 [w]_{A_inf}).
[[nodiscard]] InequalityReport verify_ainfty_scl_ratio(const StepFunction& w);

/// |E f| small relative to the sup norm.
[[nodiscard]] bool is_centered(const StepFunction& f);

}  // namespace sqfn
