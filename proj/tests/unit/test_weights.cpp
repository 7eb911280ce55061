#include <doctest.h>

#include <cmath>
#include <numeric>

#include "generators.hpp"
#include "oracles/oracles.hpp"
#include "sqfn/error.hpp"
#include "sqfn/random.hpp"
#include "sqfn/weights.hpp"

using namespace sqfn;

TEST_CASE("constant weights") {
  for (int n : {2, 3, 4}) {
    const auto w = StepFunction::constant(build_nadic(n, 3), 2.5);
    const auto c = characteristics(w);
    CHECK(c.a_infty_martingale == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(c.a_infty_semiclassical == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(c.a1 == doctest::Approx(1.0).epsilon(1e-14));
  }
}

TEST_CASE("A1 on two leaves") {
  const StepFunction w(build_nadic(2, 1), {1.0, 3.0});
  CHECK(a1_characteristic(w) == doctest::Approx(2.0).epsilon(1e-15));
  const StepFunction z(build_nadic(2, 1), {0.0, 3.0});
  CHECK(std::isinf(a1_characteristic(z)));
}

TEST_CASE("weight preconditions") {
  auto t = build_nadic(2, 2);
  CHECK_THROWS_AS((void)ainfty_martingale(StepFunction(t, {1, -1, 1, 1})), PreconditionError);
  CHECK_THROWS_AS((void)ainfty_semiclassical(StepFunction::constant(t, 0.0)), PreconditionError);
}

TEST_CASE("indicator of one leaf: martingale characteristic by brute force") {
  auto t = build_nadic(2, 4);
  for (std::size_t leaf = 0; leaf < t->leaf_count(); leaf += 5) {
    std::vector<double> v(t->leaf_count(), 0.0);
    v[leaf] = 1.0;
    const StepFunction w(t, v);
    CHECK(ainfty_martingale(w) == doctest::Approx(oracle::ainfty_martingale(w)).epsilon(1e-12));
  }
}

TEST_CASE("weighted measures and norms") {
  gen::Rng rng(9);
  auto t = gen::irregular_tree(rng, 64, 5);
  const auto one = StepFunction::constant(t, 1.0);
  const auto last = static_cast<std::uint32_t>(t->leaf_count() - 1);
  std::vector<std::uint32_t> e{last};
  CHECK(weighted_measure(one, e) == doctest::Approx(t->leaf_measures()[last]));
  std::vector<std::uint32_t> bad{last + 1};
  CHECK_THROWS_AS((void)weighted_measure(one, bad), PreconditionError);
  std::vector<std::uint32_t> all(t->leaf_count());
  std::iota(all.begin(), all.end(), 0u);
  const auto w = gen::spiky_weight(rng, t);
  CHECK(weighted_measure(w, all) == doctest::Approx(w.integral()).epsilon(1e-13));
  const auto f = gen::random_function(rng, t);
  for (double p : {0.5, 1.0, 2.0, 5.0}) CHECK(weighted_lp_norm(f, one, p) == doctest::Approx(lp_norm(f, p)).epsilon(1e-13));
}

TEST_CASE("property: characteristics match the oracles and are ordered") {
  gen::Rng rng(19);
  for (int trial = 0; trial < 150; ++trial) {
    auto t = gen::irregular_tree(rng, 64, 6);
    const auto w = trial % 2 ? gen::spiky_weight(rng, t) : abs(gen::random_function(rng, t));
    const auto c = characteristics(w);
    CHECK(c.a_infty_martingale == doctest::Approx(oracle::ainfty_martingale(w)).epsilon(1e-10));
    CHECK(c.a_infty_semiclassical == doctest::Approx(oracle::ainfty_semiclassical(w)).epsilon(1e-10));
    CHECK(c.a1 == doctest::Approx(oracle::a1(w)).epsilon(1e-10));
    CHECK(c.a_infty_martingale >= 1.0);
    CHECK(c.a_infty_martingale <= c.a_infty_semiclassical * (1 + 1e-12));
    CHECK(c.a_infty_semiclassical <= c.a1 * (1 + 1e-12));

    const double scale = gen::uniform(rng, 1e-3, 1e3);
    const auto cw = characteristics(scale * w);
    CHECK(cw.a_infty_martingale == doctest::Approx(c.a_infty_martingale).epsilon(1e-12));
    CHECK(cw.a_infty_semiclassical == doctest::Approx(c.a_infty_semiclassical).epsilon(1e-12));
    CHECK(cw.a1 == doctest::Approx(c.a1).epsilon(1e-12));
  }
}

TEST_CASE("characteristics on larger library-generated weights") {
  RandomTreeOptions opt;
  opt.max_depth = 10;
  opt.max_leaves = 4096;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    auto t = random_tree(seed, opt);
    const auto w = random_spike_weight(t, seed);
    const auto c = characteristics(w);
    CHECK(c.a_infty_martingale >= 1.0);
    CHECK(c.a_infty_martingale <= c.a_infty_semiclassical * (1 + 1e-12));
    CHECK(c.a_infty_semiclassical <= c.a1 * (1 + 1e-12));
  }
}
