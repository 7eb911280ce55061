#pragma once

// Finite-depth atomic filtrations.
//
// A FiltrationTree stores every atom of levels 0..depth. Atoms are numbered
// breadth-first, so each level and each sibling group occupies a contiguous
// id range. An atom without children sitting above the bottom level is a
// terminal atom: it persists unchanged through all finer levels (equivalent to
// a chain of single children) and contributes no martingale differences.
//
// Leaves (atoms without children) are ordered depth-first, left to right. That
// order embeds the probability space into [0,1) and is what the interval
// maximal functions use.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include <gmpxx.h>

namespace sqfn {

using AtomId = std::uint32_t;
inline constexpr AtomId kNoAtom = static_cast<AtomId>(-1);

/// Default cap on the number of leaves a builder will materialize.
inline constexpr std::size_t kDefaultMaxLeaves = std::size_t{1} << 24;

/// Relative tolerance for "children measures sum to the parent measure".
inline constexpr double kMeasureSumTolerance = 1e-12;

struct Atom {
  int level = 0;
  double measure = 0.0;      // probability mass
  double fraction = 1.0;     // measure / parent measure
  double log_measure = 0.0;  // ln(measure), accumulated from fractions
  AtomId parent = kNoAtom;
  AtomId first_child = kNoAtom;
  std::uint32_t child_count = 0;
  std::uint32_t leaf_begin = 0;  // leaf span [leaf_begin, leaf_end)
  std::uint32_t leaf_end = 0;

  [[nodiscard]] bool is_leaf() const { return child_count == 0; }
  [[nodiscard]] std::uint32_t leaf_span() const { return leaf_end - leaf_begin; }
};

struct HomogeneityParameter {
  double alpha = 1.0;            // min child/parent ratio over multi-child atoms
  double effective_alpha = 0.5;  // min(alpha, 1/2)
  bool degenerate = true;        // no atom has two or more children
};

class TreeBuilder;

class FiltrationTree {
 public:
  [[nodiscard]] int depth() const { return depth_; }
  [[nodiscard]] std::size_t atom_count() const { return atoms_.size(); }
  [[nodiscard]] std::size_t leaf_count() const { return leaf_atoms_.size(); }
  [[nodiscard]] static constexpr AtomId root() { return 0; }

  [[nodiscard]] const Atom& atom(AtomId id) const;
  [[nodiscard]] std::span<const Atom> atoms() const { return atoms_; }

  /// Atom ids of level n (contiguous range).
  [[nodiscard]] std::span<const AtomId> level(int n) const;

  /// Child ids of an atom (contiguous range, possibly empty).
  [[nodiscard]] std::span<const AtomId> children(AtomId id) const;

  [[nodiscard]] AtomId leaf_atom(std::size_t leaf) const { return leaf_atoms_.at(leaf); }
  [[nodiscard]] std::span<const AtomId> leaf_atoms() const { return leaf_atoms_; }
  [[nodiscard]] std::span<const double> leaf_measures() const { return leaf_measures_; }
  [[nodiscard]] std::span<const double> leaf_log_measures() const { return leaf_log_measures_; }

  [[nodiscard]] const HomogeneityParameter& homogeneity() const { return homogeneity_; }

  /// Exact rational measures are present when the tree was built from exact fractions.
  [[nodiscard]] bool has_exact() const { return !exact_measures_.empty(); }
  [[nodiscard]] const mpq_class& exact_measure(AtomId id) const;

  /// True when `ancestor` contains `id` (an atom contains itself).
  [[nodiscard]] bool contains(AtomId ancestor, AtomId id) const;

  /// Ancestor of a leaf at level n, or the leaf itself when it sits at level <= n.
  [[nodiscard]] AtomId ancestor_at_level(AtomId leaf, int n) const;

 private:
  friend class TreeBuilder;
  FiltrationTree() = default;

  int depth_ = 0;
  std::vector<Atom> atoms_;
  std::vector<AtomId> ids_;  // identity map 0..n-1 backing level()/children() spans
  std::vector<std::size_t> level_offsets_;
  std::vector<AtomId> leaf_atoms_;
  std::vector<double> leaf_measures_;
  std::vector<double> leaf_log_measures_;
  std::vector<mpq_class> exact_measures_;
  HomogeneityParameter homogeneity_;
};

using TreePtr = std::shared_ptr<const FiltrationTree>;

/// Incremental construction. Children are attached to existing atoms; finish()
/// renumbers breadth-first, computes leaf spans and validates all invariants.
class TreeBuilder {
 public:
  /// Floating-point tree.
  explicit TreeBuilder(int depth, std::size_t max_leaves = kDefaultMaxLeaves);

  /// Exact tree: fractions supplied through add_children_exact only.
  static TreeBuilder exact(int depth, std::size_t max_leaves = kDefaultMaxLeaves);

  [[nodiscard]] int depth() const { return depth_; }
  [[nodiscard]] int level_of(std::size_t node) const { return nodes_.at(node).level; }
  [[nodiscard]] double measure_of(std::size_t node) const { return nodes_.at(node).measure; }
  [[nodiscard]] std::size_t node_count() const { return nodes_.size(); }

  /// Attaches children with the given fractions of the parent's measure; returns
  /// the builder-local index of the first child.
  std::size_t add_children(std::size_t parent, std::span<const double> fractions);
  std::size_t add_children_exact(std::size_t parent, std::span<const mpq_class> fractions);

  [[nodiscard]] TreePtr finish();

 private:
  struct Node {
    int level = 0;
    double measure = 1.0;
    double fraction = 1.0;
    double log_measure = 0.0;
    std::size_t first_child = 0;
    std::size_t child_count = 0;
  };

  void check_parent(std::size_t parent, std::size_t count);

  int depth_;
  std::size_t max_leaves_;
  std::size_t leaf_estimate_ = 1;
  bool exact_ = false;
  std::vector<Node> nodes_;
  std::vector<mpq_class> exact_measures_;
  std::vector<mpq_class> exact_fractions_;
};

struct AtomInfo {
  int level;
  double measure;
  std::size_t index_in_level;  // position among the atoms created at this level
};

/// Returns the child fractions for an atom; an empty list makes it terminal.
using BranchingRule = std::function<std::vector<double>(const AtomInfo&)>;
using ExactBranchingRule = std::function<std::vector<mpq_class>(const AtomInfo&)>;

/// Every atom has n children of measure |Q|/n; alpha = 1/n. With `exact` the
/// tree also carries rational measures n^-k.
[[nodiscard]] TreePtr build_nadic(int n, int depth, bool exact = false,
                                  std::size_t max_leaves = kDefaultMaxLeaves);

/// Tree realizing a branching profile, level by level.
[[nodiscard]] TreePtr build_custom(int depth, const BranchingRule& rule,
                                   std::size_t max_leaves = kDefaultMaxLeaves);
[[nodiscard]] TreePtr build_custom_exact(int depth, const ExactBranchingRule& rule,
                                         std::size_t max_leaves = kDefaultMaxLeaves);

[[nodiscard]] HomogeneityParameter homogeneity(const FiltrationTree& tree);

}  // namespace sqfn
