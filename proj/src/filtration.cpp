#include "sqfn/filtration.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "sqfn/error.hpp"

namespace sqfn {

const Atom& FiltrationTree::atom(AtomId id) const {
  if (id >= atoms_.size()) {
    throw PreconditionError("atom id " + std::to_string(id) + " does not belong to this tree");
  }
  return atoms_[id];
}

std::span<const AtomId> FiltrationTree::level(int n) const {
  if (n < 0 || n > depth_) {
    throw PreconditionError("level " + std::to_string(n) + " outside 0.." + std::to_string(depth_));
  }
  const auto begin = level_offsets_[static_cast<std::size_t>(n)];
  const auto end = level_offsets_[static_cast<std::size_t>(n) + 1];
  return std::span<const AtomId>(ids_).subspan(begin, end - begin);
}

std::span<const AtomId> FiltrationTree::children(AtomId id) const {
  const Atom& a = atom(id);
  if (a.child_count == 0) return {};
  return std::span<const AtomId>(ids_).subspan(a.first_child, a.child_count);
}

const mpq_class& FiltrationTree::exact_measure(AtomId id) const {
  if (!has_exact()) throw PreconditionError("tree carries no exact measures");
  (void)atom(id);
  return exact_measures_[id];
}

bool FiltrationTree::contains(AtomId ancestor, AtomId id) const {
  const Atom& a = atom(ancestor);
  const Atom& b = atom(id);
  return a.level <= b.level && a.leaf_begin <= b.leaf_begin && b.leaf_end <= a.leaf_end;
}

AtomId FiltrationTree::ancestor_at_level(AtomId leaf, int n) const {
  AtomId cur = leaf;
  while (atoms_[cur].level > n) cur = atoms_[cur].parent;
  return cur;
}

// --- builder ---------------------------------------------------------------

TreeBuilder::TreeBuilder(int depth, std::size_t max_leaves) : depth_(depth), max_leaves_(max_leaves) {
  if (depth < 0) throw PreconditionError("depth must be nonnegative");
  nodes_.push_back(Node{});
}

TreeBuilder TreeBuilder::exact(int depth, std::size_t max_leaves) {
  TreeBuilder b(depth, max_leaves);
  b.exact_ = true;
  b.exact_measures_.emplace_back(1);
  b.exact_fractions_.emplace_back(1);
  return b;
}

void TreeBuilder::check_parent(std::size_t parent, std::size_t count) {
  if (parent >= nodes_.size()) throw PreconditionError("unknown parent atom");
  const Node& p = nodes_[parent];
  if (p.child_count != 0) throw PreconditionError("atom already has children");
  if (p.level >= depth_) throw PreconditionError("cannot split an atom on the bottom level");
  if (count == 0) throw PreconditionError("empty child list");
  leaf_estimate_ += count - 1;
  if (leaf_estimate_ > max_leaves_) {
    throw SizeError("leaf count exceeds limit of " + std::to_string(max_leaves_));
  }
}

std::size_t TreeBuilder::add_children(std::size_t parent, std::span<const double> fractions) {
  if (exact_) throw PreconditionError("exact builder requires exact fractions");
  check_parent(parent, fractions.size());
  double sum = 0.0;
  for (double f : fractions) {
    if (!(f > 0.0) || !std::isfinite(f)) throw PreconditionError("child fractions must be positive");
    sum += f;
  }
  if (std::abs(sum - 1.0) > kMeasureSumTolerance) {
    throw PreconditionError("child fractions sum to " + std::to_string(sum) + ", not 1");
  }
  const std::size_t first = nodes_.size();
  const Node p = nodes_[parent];
  for (double f : fractions) {
    Node c;
    c.level = p.level + 1;
    c.fraction = f;
    c.measure = p.measure * f;
    c.log_measure = p.log_measure + std::log(f);
    nodes_.push_back(c);
  }
  nodes_[parent].first_child = first;
  nodes_[parent].child_count = fractions.size();
  return first;
}

std::size_t TreeBuilder::add_children_exact(std::size_t parent, std::span<const mpq_class> fractions) {
  if (!exact_) throw PreconditionError("floating-point builder cannot take exact fractions");
  check_parent(parent, fractions.size());
  mpq_class sum = 0;
  for (const auto& f : fractions) {
    if (sgn(f) <= 0) throw PreconditionError("child fractions must be positive");
    sum += f;
  }
  if (sum != 1) throw PreconditionError("exact child fractions do not sum to 1");
  const std::size_t first = nodes_.size();
  const Node p = nodes_[parent];
  const mpq_class parent_exact = exact_measures_[parent];
  for (const auto& f : fractions) {
    Node c;
    c.level = p.level + 1;
    c.fraction = f.get_d();
    c.measure = p.measure * c.fraction;
    c.log_measure = p.log_measure + std::log(c.fraction);
    nodes_.push_back(c);
    exact_measures_.push_back(parent_exact * f);
    exact_fractions_.push_back(f);
  }
  nodes_[parent].first_child = first;
  nodes_[parent].child_count = fractions.size();
  return first;
}

TreePtr TreeBuilder::finish() {
  if (nodes_.size() >= static_cast<std::size_t>(std::numeric_limits<AtomId>::max())) {
    throw SizeError("too many atoms");
  }
  // Breadth-first renumbering; children of one parent stay contiguous.
  std::vector<std::size_t> order;
  order.reserve(nodes_.size());
  order.push_back(0);
  for (std::size_t head = 0; head < order.size(); ++head) {
    const Node& n = nodes_[order[head]];
    for (std::size_t c = 0; c < n.child_count; ++c) order.push_back(n.first_child + c);
  }
  std::vector<AtomId> new_id(nodes_.size(), kNoAtom);
  for (std::size_t i = 0; i < order.size(); ++i) new_id[order[i]] = static_cast<AtomId>(i);

  auto tree = std::shared_ptr<FiltrationTree>(new FiltrationTree());
  tree->depth_ = depth_;
  tree->atoms_.resize(order.size());
  for (std::size_t i = 0; i < order.size(); ++i) {
    const Node& n = nodes_[order[i]];
    Atom& a = tree->atoms_[i];
    a.level = n.level;
    a.measure = n.measure;
    a.fraction = n.fraction;
    a.log_measure = n.log_measure;
    a.child_count = static_cast<std::uint32_t>(n.child_count);
    a.first_child = n.child_count ? new_id[n.first_child] : kNoAtom;
    for (std::size_t c = 0; c < n.child_count; ++c) {
      tree->atoms_[new_id[n.first_child + c]].parent = static_cast<AtomId>(i);
    }
  }
  tree->ids_.resize(order.size());
  std::iota(tree->ids_.begin(), tree->ids_.end(), AtomId{0});

  tree->level_offsets_.assign(static_cast<std::size_t>(depth_) + 2, order.size());
  tree->level_offsets_[0] = 0;
  for (std::size_t i = order.size(); i-- > 0;) {
    tree->level_offsets_[static_cast<std::size_t>(tree->atoms_[i].level)] = i;
  }
  for (std::size_t n = static_cast<std::size_t>(depth_); n-- > 0;) {
    tree->level_offsets_[n] = std::min(tree->level_offsets_[n], tree->level_offsets_[n + 1]);
  }

  // Leaf spans: counts bottom-up, offsets top-down.
  auto& atoms = tree->atoms_;
  std::vector<std::uint32_t> leaves_below(atoms.size(), 0);
  for (std::size_t i = atoms.size(); i-- > 0;) {
    if (atoms[i].is_leaf()) {
      leaves_below[i] = 1;
    } else {
      std::uint32_t total = 0;
      for (std::uint32_t c = 0; c < atoms[i].child_count; ++c) total += leaves_below[atoms[i].first_child + c];
      leaves_below[i] = total;
    }
  }
  atoms[0].leaf_begin = 0;
  atoms[0].leaf_end = leaves_below[0];
  for (std::size_t i = 0; i < atoms.size(); ++i) {
    std::uint32_t cursor = atoms[i].leaf_begin;
    for (std::uint32_t c = 0; c < atoms[i].child_count; ++c) {
      Atom& child = atoms[atoms[i].first_child + c];
      child.leaf_begin = cursor;
      cursor += leaves_below[atoms[i].first_child + c];
      child.leaf_end = cursor;
    }
  }
  const std::size_t leaf_count = leaves_below[0];
  tree->leaf_atoms_.assign(leaf_count, kNoAtom);
  tree->leaf_measures_.assign(leaf_count, 0.0);
  tree->leaf_log_measures_.assign(leaf_count, 0.0);
  for (std::size_t i = 0; i < atoms.size(); ++i) {
    if (!atoms[i].is_leaf()) continue;
    tree->leaf_atoms_[atoms[i].leaf_begin] = static_cast<AtomId>(i);
    tree->leaf_measures_[atoms[i].leaf_begin] = atoms[i].measure;
    tree->leaf_log_measures_[atoms[i].leaf_begin] = atoms[i].log_measure;
  }

  if (exact_) {
    tree->exact_measures_.resize(order.size());
    for (std::size_t i = 0; i < order.size(); ++i) tree->exact_measures_[i] = exact_measures_[order[i]];
  }

  tree->homogeneity_ = homogeneity(*tree);
  return tree;
}

// --- constructors ----------------------------------------------------------

TreePtr build_nadic(int n, int depth, bool exact, std::size_t max_leaves) {
  if (n < 2) throw PreconditionError("n-adic tree needs n >= 2");
  if (depth < 0) throw PreconditionError("depth must be nonnegative");
  std::size_t leaves = 1;
  for (int k = 0; k < depth; ++k) {
    if (leaves > max_leaves / static_cast<std::size_t>(n)) {
      throw SizeError("n-adic leaf count n^depth exceeds limit of " + std::to_string(max_leaves));
    }
    leaves *= static_cast<std::size_t>(n);
  }
  if (exact) {
    const std::vector<mpq_class> fractions(static_cast<std::size_t>(n), mpq_class(1, n));
    return build_custom_exact(depth, [&](const AtomInfo&) { return fractions; }, max_leaves);
  }
  const std::vector<double> fractions(static_cast<std::size_t>(n), 1.0 / n);
  return build_custom(depth, [&](const AtomInfo&) { return fractions; }, max_leaves);
}

namespace {

template <typename Fraction, typename Rule, typename Add>
TreePtr build_levels(TreeBuilder builder, int depth, const Rule& rule, Add add) {
  std::vector<std::size_t> frontier{0};
  for (int level = 0; level < depth && !frontier.empty(); ++level) {
    std::vector<std::size_t> next;
    for (std::size_t i = 0; i < frontier.size(); ++i) {
      const std::size_t node = frontier[i];
      const std::vector<Fraction> fractions = rule(AtomInfo{level, builder.measure_of(node), i});
      if (fractions.empty()) continue;
      const std::size_t first = add(builder, node, fractions);
      for (std::size_t c = 0; c < fractions.size(); ++c) next.push_back(first + c);
    }
    frontier = std::move(next);
  }
  return builder.finish();
}

}  // namespace

TreePtr build_custom(int depth, const BranchingRule& rule, std::size_t max_leaves) {
  return build_levels<double>(TreeBuilder(depth, max_leaves), depth, rule,
                              [](TreeBuilder& b, std::size_t node, const std::vector<double>& f) {
                                return b.add_children(node, f);
                              });
}

TreePtr build_custom_exact(int depth, const ExactBranchingRule& rule, std::size_t max_leaves) {
  return build_levels<mpq_class>(TreeBuilder::exact(depth, max_leaves), depth, rule,
                                 [](TreeBuilder& b, std::size_t node, const std::vector<mpq_class>& f) {
                                   return b.add_children_exact(node, f);
                                 });
}

HomogeneityParameter homogeneity(const FiltrationTree& tree) {
  HomogeneityParameter h;
  for (const Atom& a : tree.atoms()) {
    if (a.child_count < 2) continue;
    h.degenerate = false;
    for (AtomId c : tree.children(static_cast<AtomId>(&a - tree.atoms().data()))) {
      h.alpha = std::min(h.alpha, tree.atom(c).fraction);
    }
  }
  h.effective_alpha = std::min(h.alpha, 0.5);
  return h;
}

}  // namespace sqfn
