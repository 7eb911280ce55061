#pragma once

// Leaf-array kernels.
//
// Every kernel exists as a scalar reference implementation; an AVX2 variant is
// compiled on x86-64 and selected at runtime when the CPU supports AVX2+FMA.
// The environment variable SQFN_SIMD=scalar forces the reference path.
//
// Reductions in the vector variants accumulate in four lanes and therefore
// differ from the scalar order by rounding only; elementwise kernels and
// max/min reductions are bit-identical across variants.

#include <cstddef>
#include <span>
#include <string_view>

namespace sqfn::kernels {

struct KernelTable {
  std::string_view name;

  /// sum_i v[i] * m[i]
  double (*weighted_sum)(const double* v, const double* m, std::size_t n);

  /// sum_i m[i] over indices with v[i] > threshold
  double (*masked_measure)(const double* v, const double* m, std::size_t n, double threshold);

  /// sum_i m[i] * exp(x[i] - shift); terms with x[i] - shift < -745 underflow to 0
  double (*exp_weighted_sum)(const double* x, const double* m, std::size_t n, double shift);

  double (*max_value)(const double* v, std::size_t n);  // -inf for n == 0
  double (*min_value)(const double* v, std::size_t n);  // +inf for n == 0

  /// dst[i] = max(dst[i], src[i])
  void (*max_inplace)(double* dst, const double* src, std::size_t n);

  /// dst[i] = a[i] * b[i]
  void (*multiply)(double* dst, const double* a, const double* b, std::size_t n);
};

[[nodiscard]] const KernelTable& scalar_table();

/// nullptr when the AVX2 variant is not compiled in or not supported by the CPU.
[[nodiscard]] const KernelTable* avx2_table();

/// Table chosen at first use (AVX2 when available unless SQFN_SIMD=scalar).
[[nodiscard]] const KernelTable& active();

// Convenience wrappers over the active table.
inline double weighted_sum(std::span<const double> v, std::span<const double> m) {
  return active().weighted_sum(v.data(), m.data(), v.size());
}
inline double masked_measure(std::span<const double> v, std::span<const double> m, double threshold) {
  return active().masked_measure(v.data(), m.data(), v.size(), threshold);
}
inline double exp_weighted_sum(std::span<const double> x, std::span<const double> m, double shift) {
  return active().exp_weighted_sum(x.data(), m.data(), x.size(), shift);
}
inline double max_value(std::span<const double> v) { return active().max_value(v.data(), v.size()); }
inline double min_value(std::span<const double> v) { return active().min_value(v.data(), v.size()); }
inline void max_inplace(std::span<double> dst, std::span<const double> src) {
  active().max_inplace(dst.data(), src.data(), dst.size());
}
inline void multiply(std::span<double> dst, std::span<const double> a, std::span<const double> b) {
  active().multiply(dst.data(), a.data(), b.data(), dst.size());
}

}  // namespace sqfn::kernels
