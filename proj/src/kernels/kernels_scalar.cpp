#include <algorithm>
#include <cmath>
#include <limits>

#include "kernels_internal.hpp"

namespace sqfn::kernels::scalar {

double weighted_sum(const double* v, const double* m, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += v[i] * m[i];
  return s;
}

double masked_measure(const double* v, const double* m, std::size_t n, double threshold) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    if (v[i] > threshold) s += m[i];
  }
  return s;
}

double exp_weighted_sum(const double* x, const double* m, std::size_t n, double shift) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += m[i] * std::exp(x[i] - shift);
  return s;
}

double max_value(const double* v, std::size_t n) {
  double r = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < n; ++i) r = v[i] > r ? v[i] : r;
  return r;
}

double min_value(const double* v, std::size_t n) {
  double r = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < n; ++i) r = v[i] < r ? v[i] : r;
  return r;
}

void max_inplace(double* dst, const double* src, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) dst[i] = src[i] > dst[i] ? src[i] : dst[i];
}

void multiply(double* dst, const double* a, const double* b, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) dst[i] = a[i] * b[i];
}

}  // namespace sqfn::kernels::scalar
