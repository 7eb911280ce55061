#pragma once

#include <cmath>
#include <limits>
#include <span>

namespace sqfn {

/// Neumaier (improved Kahan) summation.
struct CompensatedSum {
  double sum = 0.0;
  double comp = 0.0;

  void add(double x) {
    const double t = sum + x;
    if (std::abs(sum) >= std::abs(x)) {
      comp += (sum - t) + x;
    } else {
      comp += (x - t) + sum;
    }
    sum = t;
  }
  [[nodiscard]] double value() const { return sum + comp; }
};

/// ln(sum_i exp(x_i)); -inf for an empty input or all -inf terms.
inline double log_sum_exp(std::span<const double> x) {
  double hi = -std::numeric_limits<double>::infinity();
  for (double v : x) hi = v > hi ? v : hi;
  if (!std::isfinite(hi)) return hi;
  double s = 0.0;
  for (double v : x) s += std::exp(v - hi);
  return hi + std::log(s);
}

/// Accumulates ln(sum exp(x_i)) one term at a time.
struct LogSumExp {
  double hi = -std::numeric_limits<double>::infinity();
  double scaled = 0.0;  // sum exp(x_i - hi)

  void add(double x) {
    if (x == -std::numeric_limits<double>::infinity()) return;
    if (x <= hi) {
      scaled += std::exp(x - hi);
    } else {
      scaled = scaled * std::exp(hi - x) + 1.0;
      hi = x;
    }
  }
  [[nodiscard]] double value() const {
    return scaled > 0.0 ? hi + std::log(scaled) : -std::numeric_limits<double>::infinity();
  }
};

}  // namespace sqfn
