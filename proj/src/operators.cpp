#include "sqfn/operators.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "sqfn/error.hpp"
#include "sqfn/kernels.hpp"
#include "sqfn/numeric.hpp"

namespace sqfn {

StepFunction::StepFunction(TreePtr tree, std::vector<double> values)
    : tree_(std::move(tree)), values_(std::move(values)) {
  if (!tree_) throw PreconditionError("step function needs a tree");
  if (values_.size() != tree_->leaf_count()) {
    throw PreconditionError("value count " + std::to_string(values_.size()) + " does not match leaf count " +
                            std::to_string(tree_->leaf_count()));
  }
  for (double v : values_) {
    if (!std::isfinite(v)) throw PreconditionError("step function values must be finite");
  }
}

StepFunction StepFunction::constant(TreePtr tree, double c) {
  const std::size_t n = tree ? tree->leaf_count() : 0;
  return StepFunction(std::move(tree), std::vector<double>(n, c));
}

double StepFunction::integral() const { return kernels::weighted_sum(values_, tree_->leaf_measures()); }

double StepFunction::sup_norm() const { return std::max(std::abs(max()), std::abs(min())); }

double StepFunction::max() const { return kernels::max_value(values_); }

double StepFunction::min() const { return kernels::min_value(values_); }

void require_same_tree(const StepFunction& a, const StepFunction& b) {
  if (a.tree_ptr() != b.tree_ptr()) throw TreeMismatchError("step functions live on different trees");
}

double average(const StepFunction& f, AtomId id) {
  const FiltrationTree& t = f.tree();
  const Atom& a = t.atom(id);
  const auto vals = f.values().subspan(a.leaf_begin, a.leaf_span());
  if (a.measure > 1e-290) {
    return kernels::weighted_sum(vals, t.leaf_measures().subspan(a.leaf_begin, a.leaf_span())) / a.measure;
  }
  // Relative masses from log-measures avoid underflow in very deep atoms.
  const auto logm = t.leaf_log_measures().subspan(a.leaf_begin, a.leaf_span());
  double s = 0.0;
  for (std::size_t i = 0; i < vals.size(); ++i) s += vals[i] * std::exp(logm[i] - a.log_measure);
  return s;
}

std::vector<double> atom_averages(const StepFunction& f) {
  const FiltrationTree& t = f.tree();
  const auto atoms = t.atoms();
  std::vector<double> avg(atoms.size(), 0.0);
  for (std::size_t i = atoms.size(); i-- > 0;) {
    const Atom& a = atoms[i];
    if (a.is_leaf()) {
      avg[i] = f[a.leaf_begin];
      continue;
    }
    double s = 0.0;
    for (std::uint32_t c = 0; c < a.child_count; ++c) {
      const AtomId cid = a.first_child + c;
      s += atoms[cid].fraction * avg[cid];
    }
    avg[i] = s;
  }
  return avg;
}

StepFunction expectation(const StepFunction& f, int n) {
  const FiltrationTree& t = f.tree();
  if (n < 0 || n > t.depth()) {
    throw PreconditionError("level " + std::to_string(n) + " outside 0.." + std::to_string(t.depth()));
  }
  const auto avg = atom_averages(f);
  std::vector<double> out(f.size());
  for (AtomId id : t.level(n)) {
    const Atom& a = t.atom(id);
    std::fill(out.begin() + a.leaf_begin, out.begin() + a.leaf_end, avg[id]);
  }
  // Leaves above level n persist unchanged.
  for (std::size_t leaf = 0; leaf < out.size(); ++leaf) {
    const AtomId id = t.leaf_atom(leaf);
    if (t.atom(id).level < n) out[leaf] = f[leaf];
  }
  return StepFunction(f.tree_ptr(), std::move(out));
}

std::span<const double> MartingaleDecomposition::difference(AtomId q) const {
  const std::uint32_t off = offset_.at(q);
  if (off == kNone) return {};
  return std::span<const double>(values_).subspan(off, tree_->atom(q).child_count);
}

MartingaleDecomposition decompose(const StepFunction& f) {
  const FiltrationTree& t = f.tree();
  const auto avg = atom_averages(f);
  MartingaleDecomposition d;
  d.tree_ = f.tree_ptr();
  d.mean_ = avg[FiltrationTree::root()];
  d.offset_.assign(t.atom_count(), MartingaleDecomposition::kNone);
  for (std::size_t i = 0; i < t.atom_count(); ++i) {
    const Atom& a = t.atoms()[i];
    if (a.child_count < 2) continue;
    d.offset_[i] = static_cast<std::uint32_t>(d.values_.size());
    for (std::uint32_t c = 0; c < a.child_count; ++c) d.values_.push_back(avg[a.first_child + c] - avg[i]);
  }
  return d;
}

StepFunction reconstruct(const MartingaleDecomposition& d) {
  const FiltrationTree& t = d.tree();
  const auto atoms = t.atoms();
  std::vector<double> val(atoms.size(), 0.0);
  val[0] = d.mean();
  for (std::size_t i = 0; i < atoms.size(); ++i) {
    const Atom& a = atoms[i];
    const auto diff = d.difference(static_cast<AtomId>(i));
    for (std::uint32_t c = 0; c < a.child_count; ++c) {
      val[a.first_child + c] = val[i] + (diff.empty() ? 0.0 : diff[c]);
    }
  }
  std::vector<double> out(t.leaf_count());
  for (std::size_t leaf = 0; leaf < out.size(); ++leaf) out[leaf] = val[t.leaf_atom(leaf)];
  return StepFunction(d.tree_ptr(), std::move(out));
}

namespace {

// Accumulates per-atom terms down every root-to-leaf path; term[i] is added to
// all leaves below the children of atom i.
std::vector<double> path_sums(const FiltrationTree& t, const std::vector<double>& term) {
  const auto atoms = t.atoms();
  std::vector<CompensatedSum> acc(atoms.size());
  for (std::size_t i = 0; i < atoms.size(); ++i) {
    const Atom& a = atoms[i];
    for (std::uint32_t c = 0; c < a.child_count; ++c) {
      CompensatedSum s = acc[i];
      s.add(term[a.first_child + c]);
      acc[a.first_child + c] = s;
    }
  }
  std::vector<double> out(t.leaf_count());
  for (std::size_t leaf = 0; leaf < out.size(); ++leaf) out[leaf] = acc[t.leaf_atom(leaf)].value();
  return out;
}

}  // namespace

StepFunction square_function_squared(const StepFunction& f) {
  const FiltrationTree& t = f.tree();
  const auto atoms = t.atoms();
  const auto avg = atom_averages(f);
  // term indexed by child: |Delta_Q f|^2 on that child.
  std::vector<double> term(atoms.size(), 0.0);
  for (std::size_t i = 1; i < atoms.size(); ++i) {
    const double d = avg[i] - avg[atoms[i].parent];
    term[i] = d * d;
  }
  return StepFunction(f.tree_ptr(), path_sums(t, term));
}

StepFunction square_function(const StepFunction& f) {
  StepFunction s = square_function_squared(f);
  for (double& v : s.mutable_values()) v = std::sqrt(v);
  return s;
}

StepFunction square_function_p(const StepFunction& f, double p) {
  if (!(p >= 1.0)) throw PreconditionError("square function exponent p must be >= 1");
  const FiltrationTree& t = f.tree();
  const auto atoms = t.atoms();
  const auto avg = atom_averages(f);
  std::vector<double> term(atoms.size(), 0.0);
  for (std::size_t i = 0; i < atoms.size(); ++i) {
    const Atom& a = atoms[i];
    if (a.child_count < 2) continue;
    double peak = 0.0;
    for (std::uint32_t c = 0; c < a.child_count; ++c) {
      peak = std::max(peak, std::abs(avg[a.first_child + c] - avg[i]));
    }
    double q = peak * peak;
    if (std::isfinite(p) && peak > 0.0) {
      double s = 0.0;
      for (std::uint32_t c = 0; c < a.child_count; ++c) {
        const AtomId cid = a.first_child + c;
        s += atoms[cid].fraction * std::pow(std::abs(avg[cid] - avg[i]) / peak, p);
      }
      q = peak * peak * std::pow(s, 2.0 / p);
    }
    for (std::uint32_t c = 0; c < a.child_count; ++c) term[a.first_child + c] = q;
  }
  StepFunction out(f.tree_ptr(), path_sums(t, term));
  for (double& v : out.mutable_values()) v = std::sqrt(v);
  return out;
}

StepFunction maximal_function(const StepFunction& f) {
  const FiltrationTree& t = f.tree();
  const auto atoms = t.atoms();
  const auto avg = atom_averages(f);
  std::vector<double> run(atoms.size());
  run[0] = std::abs(avg[0]);
  for (std::size_t i = 0; i < atoms.size(); ++i) {
    const Atom& a = atoms[i];
    for (std::uint32_t c = 0; c < a.child_count; ++c) {
      const AtomId cid = a.first_child + c;
      run[cid] = std::max(run[i], std::abs(avg[cid]));
    }
  }
  std::vector<double> out(t.leaf_count());
  for (std::size_t leaf = 0; leaf < out.size(); ++leaf) out[leaf] = run[t.leaf_atom(leaf)];
  return StepFunction(f.tree_ptr(), std::move(out));
}

double distribution(const StepFunction& f, double lambda) {
  return kernels::masked_measure(f.values(), f.tree().leaf_measures(), lambda);
}

double log_distribution(const StepFunction& f, double lambda) {
  const auto logm = f.tree().leaf_log_measures();
  LogSumExp acc;
  for (std::size_t i = 0; i < f.size(); ++i) {
    if (f[i] > lambda) acc.add(logm[i]);
  }
  return acc.value();
}

StoppedFunction stopped_function(const StepFunction& f, double lambda) {
  if (!(lambda > 0.0)) throw PreconditionError("stopping level must be positive");
  const FiltrationTree& t = f.tree();
  const auto atoms = t.atoms();
  const auto avg = atom_averages(f);
  std::vector<AtomId> stop(atoms.size(), kNoAtom);
  StoppedFunction out{f, {}};
  for (std::size_t i = 0; i < atoms.size(); ++i) {
    const AtomId up = i == 0 ? kNoAtom : stop[atoms[i].parent];
    if (up != kNoAtom) {
      stop[i] = up;
    } else if (std::abs(avg[i]) > lambda) {
      stop[i] = static_cast<AtomId>(i);
      out.stopping.push_back(static_cast<AtomId>(i));
    }
  }
  auto& v = out.f.mutable_values();
  for (std::size_t leaf = 0; leaf < v.size(); ++leaf) {
    const AtomId s = stop[t.leaf_atom(leaf)];
    if (s != kNoAtom) v[leaf] = avg[s];
  }
  return out;
}

// --- interval maximal function ---------------------------------------------

namespace {

struct Pt {
  double x;
  double y;
};

double slope(const Pt& p, const Pt& q) { return (q.y - p.y) / (q.x - p.x); }

double cross(const Pt& o, const Pt& a, const Pt& b) {
  return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x);
}

// Largest slope(p, h[k]) over a hull whose slope sequence from p is unimodal.
double max_slope_from_left(const Pt& p, const std::vector<Pt>& h) {
  std::size_t lo = 0;
  std::size_t hi = h.size() - 1;
  while (lo < hi) {
    const std::size_t mid = (lo + hi) / 2;
    if (slope(p, h[mid]) < slope(p, h[mid + 1])) {
      lo = mid + 1;
    } else {
      hi = mid;
    }
  }
  return slope(p, h[lo]);
}

double max_slope_from_right(const Pt& q, const std::vector<Pt>& h) {
  std::size_t lo = 0;
  std::size_t hi = h.size() - 1;
  while (lo < hi) {
    const std::size_t mid = (lo + hi) / 2;
    if (slope(h[mid], q) < slope(h[mid + 1], q)) {
      lo = mid + 1;
    } else {
      hi = mid;
    }
  }
  return slope(h[lo], q);
}

class IntervalMaximal {
 public:
  IntervalMaximal(std::span<const double> a, std::span<const double> m)
      : a_(a), m_(m), out_(a.size(), 0.0), left_(a.size()), right_(a.size()) {}

  std::vector<double> run() {
    if (!a_.empty()) solve(0, a_.size());
    return std::move(out_);
  }

 private:
  void solve(std::size_t lo, std::size_t hi) {
    if (hi - lo == 1) {
      out_[lo] = std::max(out_[lo], a_[lo]);
      return;
    }
    const std::size_t mid = lo + (hi - lo) / 2;
    solve(lo, mid);
    solve(mid, hi);

    // Ranges [i, j] with i < mid <= j, in coordinates relative to the cut:
    // left point i = (-mass(i..mid-1), -total(i..mid-1)), right point j =
    // (mass(mid..j), total(mid..j)); the average is the slope between them.
    double mass = 0.0;
    double total = 0.0;
    for (std::size_t i = mid; i-- > lo;) {
      mass += m_[i];
      total += a_[i] * m_[i];
      left_[i] = Pt{-mass, -total};
    }
    mass = total = 0.0;
    for (std::size_t j = mid; j < hi; ++j) {
      mass += m_[j];
      total += a_[j] * m_[j];
      right_[j] = Pt{mass, total};
    }

    hull_.clear();
    for (std::size_t j = mid; j < hi; ++j) {
      while (hull_.size() >= 2 && cross(hull_[hull_.size() - 2], hull_.back(), right_[j]) >= 0.0) hull_.pop_back();
      hull_.push_back(right_[j]);
    }
    double run = 0.0;
    for (std::size_t i = lo; i < mid; ++i) {
      run = std::max(run, max_slope_from_left(left_[i], hull_));
      out_[i] = std::max(out_[i], run);
    }

    hull_.clear();
    for (std::size_t i = lo; i < mid; ++i) {
      while (hull_.size() >= 2 && cross(hull_[hull_.size() - 2], hull_.back(), left_[i]) <= 0.0) hull_.pop_back();
      hull_.push_back(left_[i]);
    }
    run = 0.0;
    for (std::size_t j = hi; j-- > mid;) {
      run = std::max(run, max_slope_from_right(right_[j], hull_));
      out_[j] = std::max(out_[j], run);
    }
  }

  std::span<const double> a_;
  std::span<const double> m_;
  std::vector<double> out_;
  std::vector<Pt> left_;
  std::vector<Pt> right_;
  std::vector<Pt> hull_;
};

}  // namespace

std::vector<double> interval_maximal(std::span<const double> a, std::span<const double> m) {
  if (a.size() != m.size()) throw PreconditionError("value and mass arrays differ in length");
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (!(m[i] > 0.0)) throw PreconditionError("interval maximal function needs positive masses");
    if (a[i] < 0.0) throw PreconditionError("interval maximal function needs nonnegative values");
  }
  return IntervalMaximal(a, m).run();
}

StepFunction localized_hl_maximal(const StepFunction& f, AtomId q) {
  const FiltrationTree& t = f.tree();
  const Atom& a = t.atom(q);
  std::vector<double> absval(a.leaf_span());
  for (std::size_t i = 0; i < absval.size(); ++i) absval[i] = std::abs(f[a.leaf_begin + i]);
  const auto local = interval_maximal(absval, t.leaf_measures().subspan(a.leaf_begin, a.leaf_span()));
  std::vector<double> out(f.size(), 0.0);
  std::copy(local.begin(), local.end(), out.begin() + a.leaf_begin);
  return StepFunction(f.tree_ptr(), std::move(out));
}

StepFunction hl_maximal(const StepFunction& f) { return localized_hl_maximal(f, FiltrationTree::root()); }

double lp_norm(const StepFunction& f, double p) {
  if (!(p > 0.0)) throw PreconditionError("Lp exponent must be positive");
  const double peak = f.sup_norm();
  if (std::isinf(p)) return peak;
  if (peak == 0.0) return 0.0;
  const auto m = f.tree().leaf_measures();
  double s = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) s += std::pow(std::abs(f[i]) / peak, p) * m[i];
  return peak * std::pow(s, 1.0 / p);
}

StepFunction operator+(const StepFunction& a, const StepFunction& b) {
  require_same_tree(a, b);
  std::vector<double> v(a.size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = a[i] + b[i];
  return StepFunction(a.tree_ptr(), std::move(v));
}

StepFunction operator-(const StepFunction& a, const StepFunction& b) {
  require_same_tree(a, b);
  std::vector<double> v(a.size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = a[i] - b[i];
  return StepFunction(a.tree_ptr(), std::move(v));
}

StepFunction operator*(double c, const StepFunction& a) {
  std::vector<double> v(a.values().begin(), a.values().end());
  for (double& x : v) x *= c;
  return StepFunction(a.tree_ptr(), std::move(v));
}

StepFunction abs(const StepFunction& f) {
  std::vector<double> v(f.values().begin(), f.values().end());
  for (double& x : v) x = std::abs(x);
  return StepFunction(f.tree_ptr(), std::move(v));
}

}  // namespace sqfn
