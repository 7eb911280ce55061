#pragma once

// Brute-force reference implementations. Everything here works from leaf
// sums and explicit ancestor walks, sharing no code with the production
// operators beyond the tree structure itself. Intended for trees with at
// most a few hundred leaves.

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "sqfn/operators.hpp"

namespace oracle {

using sqfn::Atom;
using sqfn::AtomId;
using sqfn::FiltrationTree;
using sqfn::StepFunction;

inline double leaf_sum_average(const FiltrationTree& t, const std::vector<double>& v, AtomId id) {
  const Atom& a = t.atom(id);
  double num = 0.0;
  double den = 0.0;
  for (std::uint32_t i = a.leaf_begin; i < a.leaf_end; ++i) {
    num += v[i] * t.leaf_measures()[i];
    den += t.leaf_measures()[i];
  }
  return den > 0.0 ? num / den : 0.0;
}

inline std::vector<double> values(const StepFunction& f) { return {f.values().begin(), f.values().end()}; }

/// Root-to-leaf chain of atom ids for a leaf.
inline std::vector<AtomId> path(const FiltrationTree& t, std::size_t leaf) {
  std::vector<AtomId> p;
  for (AtomId id = t.leaf_atom(leaf); id != sqfn::kNoAtom; id = t.atom(id).parent) p.push_back(id);
  std::reverse(p.begin(), p.end());
  return p;
}

/// Differences (Delta_Q f on the path child) along the path of each leaf, Q with >= 2 children.
inline std::vector<double> square_squared(const StepFunction& f) {
  const FiltrationTree& t = f.tree();
  const auto v = values(f);
  std::vector<double> out(f.size(), 0.0);
  for (std::size_t leaf = 0; leaf < f.size(); ++leaf) {
    const auto p = path(t, leaf);
    for (std::size_t k = 0; k + 1 < p.size(); ++k) {
      if (t.atom(p[k]).child_count < 2) continue;
      const double d = leaf_sum_average(t, v, p[k + 1]) - leaf_sum_average(t, v, p[k]);
      out[leaf] += d * d;
    }
  }
  return out;
}

/// S_p squared: sum over Q on the path of <|Delta_Q f|^p>_Q^(2/p) (p = inf: max over children).
inline std::vector<double> square_p_squared(const StepFunction& f, double p) {
  const FiltrationTree& t = f.tree();
  const auto v = values(f);
  std::vector<double> out(f.size(), 0.0);
  for (std::size_t leaf = 0; leaf < f.size(); ++leaf) {
    const auto pth = path(t, leaf);
    for (std::size_t k = 0; k + 1 < pth.size(); ++k) {
      const Atom& q = t.atom(pth[k]);
      if (q.child_count < 2) continue;
      const double aq = leaf_sum_average(t, v, pth[k]);
      double acc = 0.0;
      for (AtomId c : t.children(pth[k])) {
        const double d = std::abs(leaf_sum_average(t, v, c) - aq);
        if (std::isinf(p)) {
          acc = std::max(acc, d);
        } else {
          acc += std::pow(d, p) * t.atom(c).measure / q.measure;
        }
      }
      out[leaf] += std::isinf(p) ? acc * acc : std::pow(acc, 2.0 / p);
    }
  }
  return out;
}

inline std::vector<double> maximal(const StepFunction& f) {
  const FiltrationTree& t = f.tree();
  const auto v = values(f);
  std::vector<double> out(f.size(), 0.0);
  for (std::size_t leaf = 0; leaf < f.size(); ++leaf) {
    for (AtomId id : path(t, leaf)) out[leaf] = std::max(out[leaf], std::abs(leaf_sum_average(t, v, id)));
  }
  return out;
}

/// out[x] = max over leaf ranges [i, j] containing x of sum(a m) / sum(m); O(L^2).
inline std::vector<double> interval_max(const std::vector<double>& a, const std::vector<double>& m) {
  const std::size_t n = a.size();
  std::vector<double> out(n, 0.0);
  std::vector<double> best_from(n);  // for fixed i: best_from[x] = max over j >= x of avg(i, j)
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<double> avg(n, 0.0);
    double num = 0.0;
    double den = 0.0;
    for (std::size_t j = i; j < n; ++j) {
      num += a[j] * m[j];
      den += m[j];
      avg[j] = num / den;
    }
    double run = -1.0;
    for (std::size_t x = n; x-- > i;) {
      run = std::max(run, avg[x]);
      best_from[x] = run;
    }
    for (std::size_t x = i; x < n; ++x) out[x] = std::max(out[x], best_from[x]);
  }
  return out;
}

inline std::vector<double> localized_hl(const StepFunction& f, AtomId q) {
  const FiltrationTree& t = f.tree();
  const Atom& a = t.atom(q);
  std::vector<double> vals;
  std::vector<double> mass;
  for (std::uint32_t i = a.leaf_begin; i < a.leaf_end; ++i) {
    vals.push_back(std::abs(f[i]));
    mass.push_back(t.leaf_measures()[i]);
  }
  const auto mq = interval_max(vals, mass);
  std::vector<double> out(f.size(), 0.0);
  for (std::uint32_t i = a.leaf_begin; i < a.leaf_end; ++i) out[i] = mq[i - a.leaf_begin];
  return out;
}

/// sup over Q of <(1_Q w)*>_Q / <w>_Q with (1_Q w)* on Q = max over atoms R, x in R within Q, of <w>_R.
inline double ainfty_martingale(const StepFunction& w) {
  const FiltrationTree& t = w.tree();
  const auto v = values(w);
  double best = 1.0;
  for (AtomId q = 0; q < t.atom_count(); ++q) {
    const Atom& a = t.atom(q);
    const double wq = leaf_sum_average(t, v, q);
    if (!(wq > 0.0)) continue;
    double num = 0.0;
    for (std::uint32_t leaf = a.leaf_begin; leaf < a.leaf_end; ++leaf) {
      double star = 0.0;
      for (AtomId id = t.leaf_atom(leaf);; id = t.atom(id).parent) {
        star = std::max(star, leaf_sum_average(t, v, id));
        if (id == q) break;
      }
      num += star * t.leaf_measures()[leaf];
    }
    best = std::max(best, num / a.measure / wq);
  }
  return best;
}

inline double ainfty_semiclassical(const StepFunction& w) {
  const FiltrationTree& t = w.tree();
  const auto v = values(w);
  double best = 1.0;
  for (AtomId q = 0; q < t.atom_count(); ++q) {
    const Atom& a = t.atom(q);
    const double wq = leaf_sum_average(t, v, q);
    if (!(wq > 0.0)) continue;
    const auto mq = localized_hl(w, q);
    double num = 0.0;
    for (std::uint32_t leaf = a.leaf_begin; leaf < a.leaf_end; ++leaf) num += mq[leaf] * t.leaf_measures()[leaf];
    best = std::max(best, num / a.measure / wq);
  }
  return best;
}

inline double a1(const StepFunction& w) {
  const auto v = values(w);
  const std::vector<double> m(w.tree().leaf_measures().begin(), w.tree().leaf_measures().end());
  const auto mw = interval_max(v, m);
  double best = 1.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (v[i] == 0.0) return std::numeric_limits<double>::infinity();
    best = std::max(best, mw[i] / v[i]);
  }
  return best;
}

inline double distribution(const StepFunction& f, double lambda) {
  double s = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) {
    if (f[i] > lambda) s += f.tree().leaf_measures()[i];
  }
  return s;
}

}  // namespace oracle
