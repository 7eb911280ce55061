// Compiled with -mavx2 -mfma; only reached after a runtime CPU check.

#include "kernels_internal.hpp"

#if SQFN_HAVE_AVX2_VARIANT

#include <immintrin.h>

#include <cmath>
#include <limits>

namespace sqfn::kernels::avx2 {

namespace {

double hsum(__m256d v) {
  const __m128d lo = _mm256_castpd256_pd128(v);
  const __m128d hi = _mm256_extractf128_pd(v, 1);
  const __m128d s = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

double hmax(__m256d v) {
  const __m128d lo = _mm256_castpd256_pd128(v);
  const __m128d hi = _mm256_extractf128_pd(v, 1);
  const __m128d s = _mm_max_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_max_sd(s, _mm_unpackhi_pd(s, s)));
}

double hmin(__m256d v) {
  const __m128d lo = _mm256_castpd256_pd128(v);
  const __m128d hi = _mm256_extractf128_pd(v, 1);
  const __m128d s = _mm_min_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_min_sd(s, _mm_unpackhi_pd(s, s)));
}

// exp(x) for x in [-708, 709]: x = k ln2 + r, |r| <= ln2/2, degree-13 Taylor
// polynomial in r, result scaled by 2^k through the exponent bits.
__m256d exp_pd(__m256d x) {
  const __m256d log2e = _mm256_set1_pd(1.4426950408889634);
  const __m256d ln2_hi = _mm256_set1_pd(6.93147180369123816490e-01);
  const __m256d ln2_lo = _mm256_set1_pd(1.90821492927058770002e-10);
  const __m256d k = _mm256_round_pd(_mm256_mul_pd(x, log2e), _MM_FROUND_TO_NEAREST_INT | _MM_FROUND_NO_EXC);
  __m256d r = _mm256_fnmadd_pd(k, ln2_hi, x);
  r = _mm256_fnmadd_pd(k, ln2_lo, r);

  static constexpr double c[] = {
      1.0 / 6227020800.0, 1.0 / 479001600.0, 1.0 / 39916800.0, 1.0 / 3628800.0, 1.0 / 362880.0,
      1.0 / 40320.0,      1.0 / 5040.0,      1.0 / 720.0,      1.0 / 120.0,     1.0 / 24.0,
      1.0 / 6.0,          0.5,               1.0,              1.0};
  __m256d p = _mm256_set1_pd(c[0]);
  for (int i = 1; i < 14; ++i) p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(c[i]));

  const __m128i ki = _mm256_cvtpd_epi32(k);
  const __m256i e = _mm256_slli_epi64(_mm256_add_epi64(_mm256_cvtepi32_epi64(ki), _mm256_set1_epi64x(1023)), 52);
  return _mm256_mul_pd(p, _mm256_castsi256_pd(e));
}

}  // namespace

double weighted_sum(const double* v, const double* m, std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) acc = _mm256_fmadd_pd(_mm256_loadu_pd(v + i), _mm256_loadu_pd(m + i), acc);
  double s = hsum(acc);
  for (; i < n; ++i) s += v[i] * m[i];
  return s;
}

double masked_measure(const double* v, const double* m, std::size_t n, double threshold) {
  const __m256d t = _mm256_set1_pd(threshold);
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d mask = _mm256_cmp_pd(_mm256_loadu_pd(v + i), t, _CMP_GT_OQ);
    acc = _mm256_add_pd(acc, _mm256_and_pd(mask, _mm256_loadu_pd(m + i)));
  }
  double s = hsum(acc);
  for (; i < n; ++i) {
    if (v[i] > threshold) s += m[i];
  }
  return s;
}

double exp_weighted_sum(const double* x, const double* m, std::size_t n, double shift) {
  const __m256d sh = _mm256_set1_pd(shift);
  const __m256d lo = _mm256_set1_pd(-708.0);
  const __m256d hi = _mm256_set1_pd(709.0);
  __m256d acc = _mm256_setzero_pd();
  double s = 0.0;
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d y = _mm256_sub_pd(_mm256_loadu_pd(x + i), sh);
    const __m256d in_range =
        _mm256_and_pd(_mm256_cmp_pd(y, lo, _CMP_GE_OQ), _mm256_cmp_pd(y, hi, _CMP_LE_OQ));
    if (_mm256_movemask_pd(in_range) == 0xF) {
      acc = _mm256_fmadd_pd(_mm256_loadu_pd(m + i), exp_pd(y), acc);
    } else {
      for (std::size_t j = i; j < i + 4; ++j) s += m[j] * std::exp(x[j] - shift);
    }
  }
  s += hsum(acc);
  for (; i < n; ++i) s += m[i] * std::exp(x[i] - shift);
  return s;
}

double max_value(const double* v, std::size_t n) {
  double r = -std::numeric_limits<double>::infinity();
  std::size_t i = 0;
  if (n >= 4) {
    __m256d acc = _mm256_set1_pd(r);
    for (; i + 4 <= n; i += 4) acc = _mm256_max_pd(_mm256_loadu_pd(v + i), acc);
    r = hmax(acc);
  }
  for (; i < n; ++i) r = v[i] > r ? v[i] : r;
  return r;
}

double min_value(const double* v, std::size_t n) {
  double r = std::numeric_limits<double>::infinity();
  std::size_t i = 0;
  if (n >= 4) {
    __m256d acc = _mm256_set1_pd(r);
    for (; i + 4 <= n; i += 4) acc = _mm256_min_pd(_mm256_loadu_pd(v + i), acc);
    r = hmin(acc);
  }
  for (; i < n; ++i) r = v[i] < r ? v[i] : r;
  return r;
}

void max_inplace(double* dst, const double* src, std::size_t n) {
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    // max_pd(a, b) returns b when a is not greater, matching the scalar select.
    _mm256_storeu_pd(dst + i, _mm256_max_pd(_mm256_loadu_pd(src + i), _mm256_loadu_pd(dst + i)));
  }
  for (; i < n; ++i) dst[i] = src[i] > dst[i] ? src[i] : dst[i];
}

void multiply(double* dst, const double* a, const double* b, std::size_t n) {
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    _mm256_storeu_pd(dst + i, _mm256_mul_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i)));
  }
  for (; i < n; ++i) dst[i] = a[i] * b[i];
}

}  // namespace sqfn::kernels::avx2

#endif
