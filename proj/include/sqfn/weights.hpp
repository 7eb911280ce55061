#pragma once

#include <cstdint>
#include <span>

#include "sqfn/operators.hpp"

namespace sqfn {

struct WeightCharacteristics {
  double a_infty_martingale = 1.0;
  double a_infty_semiclassical = 1.0;
  double a1 = 1.0;
};

/// sup over atoms Q with <w>_Q > 0 of <(1_Q w)*>_Q / <w>_Q.
[[nodiscard]] double ainfty_martingale(const StepFunction& w);

/// sup over atoms Q with <w>_Q > 0 of <M_Q w>_Q / <w>_Q.
[[nodiscard]] double ainfty_semiclassical(const StepFunction& w);

/// max over leaves of M w / w with the leaf-aligned maximal function; +inf
/// when some leaf has w = 0.
[[nodiscard]] double a1_characteristic(const StepFunction& w);

[[nodiscard]] WeightCharacteristics characteristics(const StepFunction& w);

/// w(E) for E given as a list of leaf indices.
[[nodiscard]] double weighted_measure(const StepFunction& w, std::span<const std::uint32_t> leaves);

/// (sum |f|^p w m)^(1/p).
[[nodiscard]] double weighted_lp_norm(const StepFunction& f, const StepFunction& w, double p);

/// Throws PreconditionError unless w >= 0 everywhere and its integral is positive.
void require_weight(const StepFunction& w);

}  // namespace sqfn
