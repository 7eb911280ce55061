#pragma once

// Step functions on a filtration tree and the martingale operators acting on
// them: averages, conditional expectations, martingale differences, square
// functions, the martingale maximal function, distribution functions,
// stopping at a level, and interval (Hardy-Littlewood) maximal functions over
// the leaf order.

#include <cstdint>
#include <limits>
#include <span>
#include <vector>

#include "sqfn/filtration.hpp"

namespace sqfn {

class StepFunction {
 public:
  StepFunction(TreePtr tree, std::vector<double> values);

  static StepFunction constant(TreePtr tree, double c);

  [[nodiscard]] const FiltrationTree& tree() const { return *tree_; }
  [[nodiscard]] const TreePtr& tree_ptr() const { return tree_; }
  [[nodiscard]] std::span<const double> values() const { return values_; }
  [[nodiscard]] std::vector<double>& mutable_values() { return values_; }
  [[nodiscard]] double operator[](std::size_t leaf) const { return values_[leaf]; }
  [[nodiscard]] std::size_t size() const { return values_.size(); }

  /// Integral over the whole space (= expectation, the space has measure 1).
  [[nodiscard]] double integral() const;
  [[nodiscard]] double sup_norm() const;
  [[nodiscard]] double max() const;
  [[nodiscard]] double min() const;

 private:
  TreePtr tree_;
  std::vector<double> values_;
};

/// Throws TreeMismatchError unless both functions live on the same tree object.
void require_same_tree(const StepFunction& a, const StepFunction& b);

/// <f>_A; 0 for a zero-measure atom.
[[nodiscard]] double average(const StepFunction& f, AtomId a);

/// <f>_Q for every atom, computed bottom-up from child fractions.
[[nodiscard]] std::vector<double> atom_averages(const StepFunction& f);

/// E_n f: the average of f over the level-n atom containing each leaf.
[[nodiscard]] StepFunction expectation(const StepFunction& f, int n);

class MartingaleDecomposition {
 public:
  [[nodiscard]] const FiltrationTree& tree() const { return *tree_; }
  [[nodiscard]] const TreePtr& tree_ptr() const { return tree_; }
  [[nodiscard]] double mean() const { return mean_; }

  /// True for atoms with at least two children.
  [[nodiscard]] bool has_difference(AtomId q) const { return offset_.at(q) != kNone; }

  /// Values of Delta_Q f on the children of Q, in child order; empty when Q
  /// has fewer than two children.
  [[nodiscard]] std::span<const double> difference(AtomId q) const;

 private:
  friend MartingaleDecomposition decompose(const StepFunction& f);
  static constexpr std::uint32_t kNone = std::numeric_limits<std::uint32_t>::max();

  TreePtr tree_;
  double mean_ = 0.0;
  std::vector<std::uint32_t> offset_;
  std::vector<double> values_;
};

[[nodiscard]] MartingaleDecomposition decompose(const StepFunction& f);

/// <f> + sum_Q Delta_Q f, evaluated at every leaf.
[[nodiscard]] StepFunction reconstruct(const MartingaleDecomposition& d);

/// S f = (sum_Q |Delta_Q f|^2)^(1/2), compensated summation along each root path.
[[nodiscard]] StepFunction square_function(const StepFunction& f);

/// (S f)^2 without the final square root.
[[nodiscard]] StepFunction square_function_squared(const StepFunction& f);

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

/// S_p f = (sum_Q <|Delta_Q f|^p>_Q^(2/p) 1_Q)^(1/2) for p >= 1; p = kInfinity
/// uses max over children of |Delta_Q f|.
[[nodiscard]] StepFunction square_function_p(const StepFunction& f, double p);

/// f* = sup_n |E_n f|.
[[nodiscard]] StepFunction maximal_function(const StepFunction& f);

/// |{f > lambda}| (strict).
[[nodiscard]] double distribution(const StepFunction& f, double lambda);

/// ln |{f > lambda}|, accumulated from leaf log-measures; -inf for the empty set.
[[nodiscard]] double log_distribution(const StepFunction& f, double lambda);

struct StoppedFunction {
  StepFunction f;                // f with values replaced by <f>_R on every R in stopping
  std::vector<AtomId> stopping;  // maximal atoms with |<f>_R| > lambda, breadth-first order
};

[[nodiscard]] StoppedFunction stopped_function(const StepFunction& f, double lambda);

/// Interval maximal function of nonnegative values a over a contiguous range
/// with positive masses m: out[x] = max over ranges [i, j] containing x of
/// sum(a m) / sum(m). O(L log^2 L).
[[nodiscard]] std::vector<double> interval_maximal(std::span<const double> a, std::span<const double> m);

/// M_Q f: interval maximal function of |f| restricted to the leaf span of Q;
/// leaves outside Q are set to 0.
[[nodiscard]] StepFunction localized_hl_maximal(const StepFunction& f, AtomId q);

/// Leaf-aligned maximal function of |f| over the whole space.
[[nodiscard]] StepFunction hl_maximal(const StepFunction& f);

/// ||f||_p = (sum |f|^p m)^(1/p) for 0 < p < inf, max |f| for p = inf.
[[nodiscard]] double lp_norm(const StepFunction& f, double p);

/// Pointwise combinations on a shared tree.
[[nodiscard]] StepFunction operator+(const StepFunction& a, const StepFunction& b);
[[nodiscard]] StepFunction operator-(const StepFunction& a, const StepFunction& b);
[[nodiscard]] StepFunction operator*(double c, const StepFunction& a);
[[nodiscard]] StepFunction abs(const StepFunction& f);

}  // namespace sqfn
