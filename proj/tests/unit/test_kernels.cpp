#include <doctest.h>

#include <cmath>
#include <cstring>
#include <limits>
#include <vector>

#include "generators.hpp"
#include "sqfn/kernels.hpp"

using namespace sqfn;

namespace {

bool same_bits(double a, double b) { return std::memcmp(&a, &b, sizeof a) == 0; }

// Sums of positive terms: the vector variant only reorders additions.
void check_close(double a, double b, double scale) {
  CHECK(std::abs(a - b) <= 1e-13 * std::max(scale, 1e-300));
}

}  // namespace

TEST_CASE("scalar kernels on small inputs") {
  const auto& k = kernels::scalar_table();
  const std::vector<double> v{1.0, -2.0, 3.0};
  const std::vector<double> m{0.5, 0.25, 0.25};
  CHECK(k.weighted_sum(v.data(), m.data(), 3) == 0.75);
  CHECK(k.masked_measure(v.data(), m.data(), 3, 0.0) == 0.75);
  CHECK(k.masked_measure(v.data(), m.data(), 3, 1.0) == 0.25);  // strict
  CHECK(k.max_value(v.data(), 3) == 3.0);
  CHECK(k.min_value(v.data(), 3) == -2.0);
  CHECK(k.max_value(v.data(), 0) == -std::numeric_limits<double>::infinity());
  CHECK(k.min_value(v.data(), 0) == std::numeric_limits<double>::infinity());
  CHECK(k.exp_weighted_sum(v.data(), m.data(), 3, 3.0) ==
        doctest::Approx(0.5 * std::exp(-2.0) + 0.25 * std::exp(-5.0) + 0.25).epsilon(1e-15));
  const std::vector<double> huge{-1000.0, 0.0};
  const std::vector<double> ones{1.0, 1.0};
  CHECK(k.exp_weighted_sum(huge.data(), ones.data(), 2, 0.0) == 1.0);
}

TEST_CASE("property: vector kernels match the scalar reference") {
  const kernels::KernelTable* vec = kernels::avx2_table();
  if (vec == nullptr) {
    MESSAGE("AVX2 variant not available on this CPU; equivalence test skipped");
    return;
  }
  const auto& ref = kernels::scalar_table();
  gen::Rng rng(3);
  for (int trial = 0; trial < 400; ++trial) {
    const auto n = static_cast<std::size_t>(gen::uniform_int(rng, 0, 300));
    auto v = gen::gaussian(rng, n, gen::uniform(rng, 0.1, 20.0));
    std::vector<double> m(n);
    double total = 0.0;
    for (double& x : m) total += (x = gen::uniform(rng, 1e-6, 1.0));
    for (double& x : m) x /= total;
    // Sprinkle exact ties with the threshold and extreme values.
    if (n > 4) {
      v[n / 2] = 0.5;
      v[1] = -700.0;
    }

    double abs_sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) abs_sum += std::abs(v[i]) * m[i];
    check_close(vec->weighted_sum(v.data(), m.data(), n), ref.weighted_sum(v.data(), m.data(), n), abs_sum);
    for (double thr : {-1.0, 0.0, 0.5, 2.0}) {
      check_close(vec->masked_measure(v.data(), m.data(), n, thr), ref.masked_measure(v.data(), m.data(), n, thr),
                  1.0);
    }
    const double shift = n ? ref.max_value(v.data(), n) : 0.0;
    const double es = ref.exp_weighted_sum(v.data(), m.data(), n, shift);
    CHECK(std::abs(vec->exp_weighted_sum(v.data(), m.data(), n, shift) - es) <= 1e-13 * std::max(es, 1e-300));

    CHECK(same_bits(vec->max_value(v.data(), n), ref.max_value(v.data(), n)));
    CHECK(same_bits(vec->min_value(v.data(), n), ref.min_value(v.data(), n)));

    auto w = gen::gaussian(rng, n);
    auto d1 = w;
    auto d2 = w;
    vec->max_inplace(d1.data(), v.data(), n);
    ref.max_inplace(d2.data(), v.data(), n);
    CHECK(std::memcmp(d1.data(), d2.data(), n * sizeof(double)) == 0);
    vec->multiply(d1.data(), v.data(), w.data(), n);
    ref.multiply(d2.data(), v.data(), w.data(), n);
    CHECK(std::memcmp(d1.data(), d2.data(), n * sizeof(double)) == 0);
  }
}

TEST_CASE("vector exp over the full exponent range") {
  const kernels::KernelTable* vec = kernels::avx2_table();
  if (vec == nullptr) return;
  std::vector<double> x;
  for (double t = -740.0; t <= 709.0; t += 0.37) x.push_back(t);
  for (std::size_t i = 0; i < x.size(); ++i) {
    // Four equal lanes keep the vector body in range; only the first is weighted.
    std::vector<double> xs(4, x[i]);
    std::vector<double> ms{1.0, 0.0, 0.0, 0.0};
    const double got = vec->exp_weighted_sum(xs.data(), ms.data(), 4, 0.0);
    const double want = std::exp(x[i]);
    if (want < 1e-300) {
      CHECK(got <= 1e-300);
    } else {
      CHECK(std::abs(got - want) <= 4e-15 * want);
    }
  }
}

TEST_CASE("active table") {
  const auto& a = kernels::active();
  CHECK((a.name == "scalar" || a.name == "avx2"));
}
