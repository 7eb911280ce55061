#include <doctest.h>

#include <cmath>
#include <numbers>

#include "generators.hpp"
#include "sqfn/certificates.hpp"
#include "sqfn/constructions.hpp"
#include "sqfn/error.hpp"
#include "sqfn/weights.hpp"

using namespace sqfn;

namespace {

// 1 + sum (n/2e)^n / n! through the term ratio (n/(n-1))^(n-1) / (2e).
long double series_by_recurrence(int terms) {
  long double t = 1.0L / (2.0L * std::numbers::e_v<long double>);
  long double s = 1.0L + t;
  for (int n = 2; n <= terms; ++n) {
    t *= std::pow(static_cast<long double>(n) / (n - 1), n - 1) / (2.0L * std::numbers::e_v<long double>);
    s += t;
  }
  return s;
}

}  // namespace

TEST_CASE("Bellman function") {
  CHECK(bellman_U(0, 0, 0.5) == 1.0);
  CHECK(bellman_U(1, 0, 0.3) == doctest::Approx(std::numbers::e).epsilon(1e-15));
  CHECK(bellman_U(0, 1, 0.25) == doctest::Approx(std::exp(-1.0)).epsilon(1e-15));
  CHECK_THROWS_AS((void)bellman_U(0, -1, 0.25), PreconditionError);
  CHECK_THROWS_AS((void)bellman_U(0, 1, 0.6), PreconditionError);
}

TEST_CASE("two-point lemma") {
  const double p[2] = {0.5, 0.5};
  const double zero[2] = {0.0, 0.0};
  CHECK(two_point_excess(p, zero, 0.5) == 0.0);
  for (int i = 0; i <= 2000; ++i) {
    const double c = -10.0 + 0.01 * i;
    const double cs[2] = {c, -c};
    const double closed = std::exp(-c * c / 2) * std::cosh(c) - 1.0;
    CHECK(std::abs(two_point_excess(p, cs, 0.5) - closed) <= 1e-15);
    CHECK(two_point_excess(p, cs, 0.5) <= 1e-15);
  }
  for (double a : {1.0 / 8, 0.05, 0.25, 0.5}) {
    const auto r = check_two_point_lemma(a, TwoPointStrategy::Reduced, 100000);
    CHECK(r.certified());
    CHECK(r.worst_margin >= 0.0);  // c1 = 0 is on the grid and gives exactly 0
    CHECK(r.evaluations == 100000);
    const auto rr = check_two_point_lemma(a, TwoPointStrategy::Random, 20000, 7);
    CHECK(rr.certified());
    const auto again = check_two_point_lemma(a, TwoPointStrategy::Random, 20000, 7);
    CHECK(again.worst_margin == rr.worst_margin);
    CHECK(again.worst_location == rr.worst_location);
  }
  CHECK_THROWS_AS((void)check_two_point_lemma(0.7, TwoPointStrategy::Reduced), PreconditionError);
}

TEST_CASE("dzili proposition") {
  for (double n : {2.0, 2.5, 3.0, 10.0, 100.0, 1000.0}) CHECK(dzili_excess(n, 1.0) == 0.0);
  CHECK(dzili_excess(2.0, 0.0) + 2.0 == doctest::Approx(std::exp(0.5) + std::exp(-1.5)).epsilon(1e-15));
  CHECK(dzili_excess(2.0, 0.0) + 2.0 == doctest::Approx(1.8719).epsilon(1e-4));
  for (double n : {2.0, 3.0, 10.0, 100.0}) {
    const auto c = check_dzili(n, 100000);
    CHECK(c.certified());
    CHECK(c.worst_margin <= 1e-15);  // rounding only; the maximum sits at a = 1
    CHECK(c.worst_location.back().second == 0.0);
  }
  CHECK_THROWS_AS((void)check_dzili(1.5, 1000), PreconditionError);
  CHECK_THROWS_AS((void)check_dzili(2.0, 10), PreconditionError);
}

TEST_CASE("rm1 inequality") {
  const double a = std::ldexp(1.0, -10);
  CHECK(check_rm1(1.0, a) <= 0.0);
  const double m = check_rm1(0.9, a);
  CHECK(m > 0.0);
  CHECK(m == doctest::Approx(0.1 * a).epsilon(0.02));  // (1 - C) alpha dominates
  CHECK(check_rm1(2.0, 0.25) < 0.0);
}

TEST_CASE("optimal C") {
  const auto half = optimal_C(0.5);
  CHECK(std::abs(half.value - 0.5) <= 1e-3);
  CHECK(half.upper - half.lower <= 1e-6);
  for (double a : {0.05, 0.1, 0.25, 0.5}) CHECK(optimal_C(a).value >= a - 1e-6);

  double prev = kInfinity;
  for (int k : {4, 6, 8}) {
    const double a = std::ldexp(1.0, -k);
    const double ratio = optimal_C(a).value / a;
    CHECK(ratio >= 1.0 - 1e-4);
    CHECK(ratio <= prev);
    prev = ratio;
  }

  // Finer inner grids only find larger violations.
  double last = kInfinity;
  for (std::size_t g : {101, 201, 401, 801, 1601}) {
    const double v = optimal_C(0.125, 1e-7, g).value;
    CHECK(v <= last + 1e-7);
    last = v;
  }
  CHECK_THROWS_AS((void)optimal_C(0.25, 0.0), PreconditionError);
}

TEST_CASE("series constant") {
  const auto s = superexp_constant(1e-15);
  CHECK(s.value == doctest::Approx(static_cast<double>(series_by_recurrence(s.terms))).epsilon(1e-15));
  CHECK(s.value == doctest::Approx(1.30).epsilon(0.005));
  CHECK(s.last_term < 1e-15);
  CHECK(s.tail_bound == 1.5 * s.last_term);
  CHECK(superexp_constant(1.0).value == doctest::Approx(1.0 + 1.0 / (2 * std::numbers::e)).epsilon(1e-15));
  CHECK(1.0 / (2 * std::numbers::e) == doctest::Approx(0.18394).epsilon(1e-4));

  double prev = 0.0;
  for (double eps : {1e-1, 1e-2, 1e-4, 1e-8, 1e-12}) {
    const double v = superexp_constant(eps).value;
    CHECK(v >= prev);
    prev = v;
  }
  // Term ratios stay below 0.6 from n = 2 on, so 1.5 x the last term bounds the tail.
  const auto coarse = superexp_constant(1e-4);
  CHECK(static_cast<double>(series_by_recurrence(200)) - coarse.value <= coarse.tail_bound);

  CHECK(superexp_constant_from(1, 0.0, 1e-15) == doctest::Approx(s.value).epsilon(1e-15));
  CHECK(superexp_constant_from(3, 0.1, 1e-15) > 0.0);
}

TEST_CASE("gamma and good-lambda constants") {
  CHECK(gamma_constant(0.5, 1, 1) == doctest::Approx(1 / (4 * std::numbers::e)).epsilon(1e-15));
  CHECK(gamma_constant(1, 1, 1) == doctest::Approx(1 / (2 * std::numbers::e)).epsilon(1e-15));
  for (double k : {0.25, 0.5, 2.0}) {
    CHECK(gamma_constant(k, 1.7, 3.0 * 2.0) ==
          doctest::Approx(std::pow(3.0, -1.0 / k) * gamma_constant(k, 1.7, 2.0)).epsilon(1e-14));
  }
  CHECK(good_lambda_constant(0.5, 0.5) == doctest::Approx(2 * std::exp(-0.125 * 0.25 / (0.5 * 0.25))).epsilon(1e-15));
  CHECK(good_lambda_constant(0.25, 1.0 - 1e-12) == doctest::Approx(2.0));
  const auto table = constant_table(0.25, 2.0, 0.5);
  CHECK_FALSE(table.empty());
  for (const auto& c : table) CHECK(std::isfinite(c.value));
}

TEST_CASE("moments to superexponential integrability") {
  const auto z = StepFunction::constant(build_nadic(2, 3), 0.0);
  const std::vector<double> lambdas{0.5, 1, 2, 3, 4};
  const auto rz = verify_lp_to_superexp(z, 1.0, 0.5, 1.0, lambdas);
  CHECK(rz.reports[1].lhs == 1.0);
  for (const auto& r : rz.reports) CHECK_FALSE(r.failed());

  for (double a : {0.25, 0.125}) {
    const auto fam = build_sharpness(a, 30);
    const auto f = (1.0 / fam.sup_sg) * fam.g;
    const auto out = verify_lp_to_superexp(f, 1.0, 0.5, 0.0, lambdas);
    CHECK(out.B > 0.0);
    CHECK(out.gamma == doctest::Approx(gamma_constant(0.5, out.B, 1.0)).epsilon(1e-15));
    REQUIRE(out.reports.size() == 2 + lambdas.size());
    for (const auto& r : out.reports) CHECK(r.status == ReportStatus::Pass);
  }
  CHECK_THROWS_AS((void)verify_lp_to_superexp(z, 1.0, 0.5, 1.0, lambdas, 0), PreconditionError);
}

TEST_CASE("extrapolation weight") {
  SUBCASE("constant phi") {
    const auto phi = StepFunction::constant(build_nadic(2, 4), 1.0);
    const auto r = rubio_weight(phi, 4.0, 2.0, 3);
    const double q = 8.0;
    const double expect = 1 + 1 / q + 1 / (q * q) + 1 / (q * q * q);
    for (double x : r.w.values()) CHECK(x == doctest::Approx(expect).epsilon(1e-14));
    CHECK(r.a1 == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(r.terms == 3);
  }
  SUBCASE("spike spreads everywhere") {
    auto t = build_nadic(2, 5);
    std::vector<double> v(t->leaf_count(), 0.0);
    v[7] = 1.0;
    StepFunction phi(t, v);
    const auto r = rubio_weight(phi, 2.0, 2.0, 1);
    CHECK(r.w.min() > 0.0);
  }
  SUBCASE("property: norm, A1 and truncation control") {
    gen::Rng rng(211);
    for (int trial = 0; trial < 30; ++trial) {
      auto t = gen::irregular_tree(rng, 128, 6);
      auto phi = gen::spiky_weight(rng, t);
      const double p = gen::uniform(rng, 2.0, 6.0);
      const double r_dual = p / 2 == 1.0 ? kInfinity : (p / 2) / (p / 2 - 1);
      phi = (1.0 / lp_norm(phi, r_dual)) * phi;
      const double q = 2.0 * p;
      const auto r = rubio_weight(phi, p);
      CHECK(r.norm_phi == doctest::Approx(1.0).epsilon(1e-12));
      CHECK(r.relative_slack < 1e-8);
      CHECK(r.norm_w <= 2.0 * r.norm_phi * (1 + 1e-6));
      // M w <= C_M p w up to the truncation slack.
      CHECK(r.max_pointwise_excess <= r.truncation_slack * (1 + 1e-9) + 1e-12);
      CHECK(r.a1 <= q * (1 + r.relative_slack) + 1e-9);

      const int k = gen::uniform_int(rng, 1, 4);
      const auto wk = rubio_weight(phi, p, 2.0, k);
      const auto wk1 = rubio_weight(phi, p, 2.0, k + 1);
      StepFunction mk = phi;
      for (int n = 0; n <= k; ++n) mk = hl_maximal(mk);
      const double bound = std::pow(q, -(k + 1)) * mk.sup_norm();
      for (std::size_t i = 0; i < phi.size(); ++i) CHECK(std::abs(wk1.w[i] - wk.w[i]) <= bound * (1 + 1e-9));
    }
  }
  SUBCASE("contraction failure is diagnosed") {
    auto t = build_nadic(2, 6);
    std::vector<double> v(t->leaf_count(), 0.0);
    v[0] = 1.0;
    CHECK_THROWS_AS((void)rubio_weight(StepFunction(t, v), 2.0, 0.05), ResolutionError);
    CHECK_THROWS_AS((void)rubio_weight(StepFunction(t, v), 1.5), PreconditionError);
  }
}

TEST_CASE("good-lambda modification") {
  SUBCASE("nothing to modify") {
    gen::Rng rng(5);
    auto t = build_nadic(3, 3);
    auto f = gen::random_function(rng, t, 0.001);
    for (double& x : f.mutable_values()) x += 5.0;
    const auto m = good_lambda_modified(f, 1.0, 0.9, 0);
    CHECK(m.stopping.empty());
    for (std::size_t i = 0; i < f.size(); ++i) {
      CHECK(m.f3[i] == doctest::Approx(m.f1[i]).epsilon(1e-12).scale(1e-12));
      CHECK(m.f2[i] == doctest::Approx(m.f1[i]).epsilon(1e-12).scale(1e-12));
    }
  }
  SUBCASE("Q must be a stopping atom") {
    const StepFunction f(build_nadic(2, 1), {0.5, 3.0});
    CHECK_THROWS_AS((void)good_lambda_modified(f, 2.0, 0.5, 0), PreconditionError);
    CHECK_NOTHROW((void)good_lambda_modified(f, 2.0, 0.5, 2));
  }
  SUBCASE("property: guarantees on random inputs") {
    gen::Rng rng(223);
    int modified = 0;
    for (int trial = 0; trial < 200; ++trial) {
      const double alpha = gen::uniform(rng, 0.1, 0.5);
      auto t = gen::homogeneous_tree(rng, alpha, gen::uniform_int(rng, 2, 7), 1024);
      const auto f = gen::random_function(rng, t);
      auto avg = atom_averages(f);
      for (double& a : avg) a = std::abs(a);
      std::nth_element(avg.begin(), avg.begin() + avg.size() / 2, avg.end());
      const double lambda = std::max(avg[avg.size() / 2], 1e-3);
      const double eps = gen::uniform(rng, 0.1, 0.9);
      const auto stop = stopped_function(f, lambda).stopping;
      for (std::size_t k = 0; k < std::min<std::size_t>(stop.size(), 4); ++k) {
        const auto m = good_lambda_modified(f, lambda, eps, stop[k]);
        const double a = t->homogeneity().effective_alpha;
        const double closed = (eps * lambda) * (eps * lambda) * (1 - 2 * a + 2 * a * a) / (a * a);
        CHECK(m.sf3_bound == doctest::Approx(closed).epsilon(1e-12));
        CHECK(m.agree_outside);
        CHECK(m.sup_sf3_squared <= m.sf3_bound * (1 + 1e-12));
        CHECK(m.contains_e_q);
        CHECK(m.max_mean_error <= 1e-10);
        modified += m.modified.empty() ? 0 : 1;
      }
    }
    CHECK(modified > 0);
  }
}
