#pragma once

#include <cstddef>

#if defined(__x86_64__) || defined(_M_X64)
#define SQFN_HAVE_AVX2_VARIANT 1
#else
#define SQFN_HAVE_AVX2_VARIANT 0
#endif

namespace sqfn::kernels {

namespace scalar {
double weighted_sum(const double* v, const double* m, std::size_t n);
double masked_measure(const double* v, const double* m, std::size_t n, double threshold);
double exp_weighted_sum(const double* x, const double* m, std::size_t n, double shift);
double max_value(const double* v, std::size_t n);
double min_value(const double* v, std::size_t n);
void max_inplace(double* dst, const double* src, std::size_t n);
void multiply(double* dst, const double* a, const double* b, std::size_t n);
}  // namespace scalar

#if SQFN_HAVE_AVX2_VARIANT
namespace avx2 {
double weighted_sum(const double* v, const double* m, std::size_t n);
double masked_measure(const double* v, const double* m, std::size_t n, double threshold);
double exp_weighted_sum(const double* x, const double* m, std::size_t n, double shift);
double max_value(const double* v, std::size_t n);
double min_value(const double* v, std::size_t n);
void max_inplace(double* dst, const double* src, std::size_t n);
void multiply(double* dst, const double* a, const double* b, std::size_t n);
}  // namespace avx2
#endif

}  // namespace sqfn::kernels
