#include "sqfn/weights.hpp"

#include <algorithm>
#include <cmath>

#include "sqfn/error.hpp"
#include "sqfn/kernels.hpp"

namespace sqfn {

void require_weight(const StepFunction& w) {
  if (w.min() < 0.0) throw PreconditionError("weight has negative values");
  if (!(w.integral() > 0.0)) throw PreconditionError("weight vanishes identically");
}

double ainfty_martingale(const StepFunction& w) {
  require_weight(w);
  const FiltrationTree& t = w.tree();
  const auto avg = atom_averages(w);
  const auto m = t.leaf_measures();
  // running[x] = max of <w>_R over atoms R containing x at the levels swept so far;
  // starting from w itself covers leaves that stop above the bottom level.
  std::vector<double> running(w.values().begin(), w.values().end());
  double best = 1.0;
  for (int level = t.depth(); level >= 0; --level) {
    for (AtomId id : t.level(level)) {
      const Atom& a = t.atom(id);
      double* r = running.data() + a.leaf_begin;
      const double v = avg[id];
      for (std::uint32_t i = 0; i < a.leaf_span(); ++i) r[i] = v > r[i] ? v : r[i];
      if (!(v > 0.0) || a.is_leaf()) continue;
      const double num = kernels::weighted_sum(std::span<const double>(r, a.leaf_span()),
                                               m.subspan(a.leaf_begin, a.leaf_span()));
      const double den = kernels::weighted_sum(w.values().subspan(a.leaf_begin, a.leaf_span()),
                                               m.subspan(a.leaf_begin, a.leaf_span()));
      best = std::max(best, num / den);
    }
  }
  return best;
}

double ainfty_semiclassical(const StepFunction& w) {
  require_weight(w);
  const FiltrationTree& t = w.tree();
  const auto m = t.leaf_measures();
  double best = 1.0;
  for (std::size_t i = 0; i < t.atom_count(); ++i) {
    const Atom& a = t.atoms()[i];
    // Single-child atoms share the span (and the ratio) of their child.
    if (a.child_count < 2) continue;
    const auto vals = w.values().subspan(a.leaf_begin, a.leaf_span());
    const auto mass = m.subspan(a.leaf_begin, a.leaf_span());
    const double den = kernels::weighted_sum(vals, mass);
    if (!(den > 0.0)) continue;
    const auto mw = interval_maximal(vals, mass);
    best = std::max(best, kernels::weighted_sum(mw, mass) / den);
  }
  return best;
}

double a1_characteristic(const StepFunction& w) {
  require_weight(w);
  const auto mw = interval_maximal(w.values(), w.tree().leaf_measures());
  double best = 1.0;
  for (std::size_t i = 0; i < mw.size(); ++i) {
    if (w[i] == 0.0) return kInfinity;
    best = std::max(best, mw[i] / w[i]);
  }
  return best;
}

WeightCharacteristics characteristics(const StepFunction& w) {
  return WeightCharacteristics{ainfty_martingale(w), ainfty_semiclassical(w), a1_characteristic(w)};
}

double weighted_measure(const StepFunction& w, std::span<const std::uint32_t> leaves) {
  const auto m = w.tree().leaf_measures();
  double s = 0.0;
  for (std::uint32_t leaf : leaves) {
    if (leaf >= w.size()) throw PreconditionError("leaf index outside the tree");
    s += w[leaf] * m[leaf];
  }
  return s;
}

double weighted_lp_norm(const StepFunction& f, const StepFunction& w, double p) {
  require_same_tree(f, w);
  if (!(p > 0.0) || std::isinf(p)) throw PreconditionError("weighted Lp exponent must lie in (0, inf)");
  const auto m = w.tree().leaf_measures();
  const double peak = f.sup_norm();
  if (peak == 0.0) return 0.0;
  double s = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) s += std::pow(std::abs(f[i]) / peak, p) * w[i] * m[i];
  return peak * std::pow(s, 1.0 / p);
}

}  // namespace sqfn
