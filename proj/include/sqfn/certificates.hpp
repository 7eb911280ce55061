#pragma once

// Scalar inequalities and constants behind the square-function estimates,
// checked on explicit grids, plus the two function-level constructions used
// in the proofs (extrapolation weight, good-lambda modification).

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "sqfn/operators.hpp"
#include "sqfn/report.hpp"

namespace sqfn {

struct ScalarCertificate {
  std::string name;
  std::vector<std::pair<std::string, double>> params;          // ranges, grid sizes, seed
  double worst_margin = 0.0;                                   // max over the grid; <= 0 certifies
  std::vector<std::pair<std::string, double>> worst_location;  // argmax, ties broken by lowest index
  std::uint64_t evaluations = 0;

  [[nodiscard]] bool certified(double tolerance = 1e-9) const { return worst_margin <= tolerance; }
};

/// U_alpha(x, y) = exp(x - y^2 / 4 alpha).
[[nodiscard]] double bellman_U(double x, double y, double alpha);

/// sum_j p_j exp(c_j - c_j^2 / 4C) - 1, evaluated as sum_j p_j expm1(...) (requires sum p_j = 1).
[[nodiscard]] double two_point_excess(std::span<const double> p, std::span<const double> c, double C);

enum class TwoPointStrategy {
  Reduced,  // p2 = alpha, c1 on a grid over [0, 2 alpha], c2 = -p1 c1 / alpha
  Random,   // random admissible configurations with 2..6 points
};

[[nodiscard]] ScalarCertificate check_two_point_lemma(double alpha, TwoPointStrategy strategy,
                                                      std::size_t grid = 100000, std::uint64_t seed = 1);

/// (n-1) exp((1-a^2)/n) + exp((1-(n(1-a)+a)^2)/n) - n at a point.
[[nodiscard]] double dzili_excess(double n, double a);

/// max over a uniform grid on [0, 1] (endpoints included) of dzili_excess.
[[nodiscard]] ScalarCertificate check_dzili(double n, std::size_t grid_size);

/// (1-alpha) exp(2 alpha - C alpha) + alpha exp(2(alpha-1) - C (alpha-1)^2 / alpha) - 1.
[[nodiscard]] double check_rm1(double C, double alpha);

struct OptimalC {
  double value = 0.0;  // midpoint of the final bracket
  double lower = 0.0;  // largest C found admissible
  double upper = 0.0;  // smallest C found violated
  int iterations = 0;
  double worst_p = 0.0;  // violating configuration at `upper`
  double worst_c2 = 0.0;
};

/// Largest C with sum_j p_j exp(c_j - c_j^2/4C) <= 1 over two-point configs with
/// p_j >= alpha, sum p_j c_j = 0. `grid` is the size of each search stage.
[[nodiscard]] OptimalC optimal_C(double alpha, double tol = 1e-6, std::size_t grid = 1000);

/// Inner maximization used by optimal_C: max excess over the two-stage grid.
[[nodiscard]] double two_point_max_excess(double alpha, double C, std::size_t grid, double* worst_p = nullptr,
                                          double* worst_c2 = nullptr);

struct SeriesConstant {
  double value = 0.0;       // 1 + sum_{n=1}^{terms} (n/2e)^n / n!
  double tail_bound = 0.0;  // bound on the omitted terms
  int terms = 0;
  double last_term = 0.0;
};

/// C = 1 + sum_n (n/(2e))^n / n!, summed until the term drops below truncation_eps.
[[nodiscard]] SeriesConstant superexp_constant(double truncation_eps);

/// Constant when the moment hypothesis starts at n = N:
/// e^gamma + N (N/2e)^N / N! + sum_{n>N} (n/2e)^n / n!.
[[nodiscard]] double superexp_constant_from(int N, double gamma, double truncation_eps);

/// gamma = kappa / (2e) * B^(-1/kappa) * g_sup^(-1/kappa).
[[nodiscard]] double gamma_constant(double kappa, double B, double g_sup);

/// Good-lambda factor 2 exp(-alpha^3 (1-eps)^2 / ((1 - 2 alpha + 2 alpha^2) eps^2)).
[[nodiscard]] double good_lambda_constant(double alpha, double epsilon);

struct NamedConstant {
  std::string name;
  double value;
  std::string formula;
};

/// Constants entering the verifiers at the given parameters.
[[nodiscard]] std::vector<NamedConstant> constant_table(double alpha, double p, double epsilon);

struct LpToSuperexp {
  double B = 0.0;      // constant used in the moment hypothesis
  double gamma = 0.0;  // integrability exponent
  double series = 0.0;
  int moments_checked = 0;  // hypothesis verified at p = n / kappa for n = start..moments_checked
  std::vector<InequalityReport> reports;  // hypothesis rows, the integral bound, Markov rows
};

/// Checks int exp(gamma |f|^(1/kappa)) <= C given ||f||_p <= B p^kappa g_sup for p = n/kappa,
/// n >= hypothesis_start. B <= 0 means "measure the smallest admissible B". Beyond the
/// checked moments the hypothesis holds automatically because ||f||_p <= ||f||_inf.
[[nodiscard]] LpToSuperexp verify_lp_to_superexp(const StepFunction& f, double g_sup, double kappa, double B,
                                                 std::span<const double> lambdas, int hypothesis_start = 1);

struct RubioWeight {
  StepFunction w;
  int terms = 0;                // K
  double truncation_slack = 0;  // (C_M p)^(-K) ||M^(K+1) phi||_inf
  double relative_slack = 0;    // truncation_slack / min w
  double a1 = 0;                // measured [w]_{A_1}
  double norm_w = 0;            // ||w||_{r'}
  double norm_phi = 0;          // ||phi||_{r'}
  double max_pointwise_excess = 0;  // max over leaves of (M w - C_M p w)
};

/// w = phi + sum_{n=1}^{K} (C_M p)^(-n) M^n phi with the leaf-aligned maximal operator.
/// terms <= 0 picks the smallest K with relative truncation slack below 1e-8. Throws
/// ResolutionError when a measured step ||M^(n+1) phi||_{r'} exceeds (C_M p / 2) ||M^n phi||_{r'}.
[[nodiscard]] RubioWeight rubio_weight(const StepFunction& phi, double p, double c_m = 2.0, int terms = 0);

struct GoodLambdaModification {
  StepFunction f1;
  StepFunction f2;
  StepFunction f3;
  std::vector<AtomId> stopping;  // maximal atoms R inside Q with S f1 >= eps lambda on R
  std::vector<AtomId> modified;  // parents whose differences were averaged on stopping children
  // Guarantees, evaluated numerically.
  bool agree_outside = false;     // f2 = f3 and S f2 = S f3 off the stopping atoms
  double sup_sf3_squared = 0.0;   // ||S f3||_inf^2
  double sf3_bound = 0.0;         // (eps lambda)^2 (1 - 2 alpha + 2 alpha^2) / alpha^2
  bool contains_e_q = false;      // E_Q inside {f3* > (1-eps) lambda, S f3 <= eps lambda}
  double max_mean_error = 0.0;    // largest |mean| of a modified difference
};

/// The f1/f2/f3 modification inside a maximal stopping atom Q of level lambda.
[[nodiscard]] GoodLambdaModification good_lambda_modified(const StepFunction& f, double lambda, double epsilon,
                                                          AtomId q);

}  // namespace sqfn
