#include "sqfn/exact.hpp"

#include "sqfn/error.hpp"

namespace sqfn {

ExactStepFunction::ExactStepFunction(TreePtr tree, std::vector<mpq_class> values)
    : tree_(std::move(tree)), values_(std::move(values)) {
  if (!tree_ || !tree_->has_exact()) throw PreconditionError("exact step function needs an exact tree");
  if (values_.size() != tree_->leaf_count()) throw PreconditionError("value count does not match leaf count");
}

std::vector<mpq_class> exact_atom_averages(const ExactStepFunction& f) {
  const FiltrationTree& t = f.tree();
  const auto atoms = t.atoms();
  std::vector<mpq_class> avg(atoms.size());
  for (std::size_t i = atoms.size(); i-- > 0;) {
    const Atom& a = atoms[i];
    if (a.is_leaf()) {
      avg[i] = f.values()[a.leaf_begin];
      continue;
    }
    mpq_class s = 0;
    for (std::uint32_t c = 0; c < a.child_count; ++c) {
      const AtomId cid = a.first_child + c;
      s += t.exact_measure(cid) * avg[cid];
    }
    avg[i] = s / t.exact_measure(static_cast<AtomId>(i));
  }
  return avg;
}

mpq_class exact_integral(const ExactStepFunction& f) {
  const FiltrationTree& t = f.tree();
  mpq_class s = 0;
  for (std::size_t leaf = 0; leaf < t.leaf_count(); ++leaf) s += f.values()[leaf] * t.exact_measure(t.leaf_atom(leaf));
  return s;
}

std::vector<mpq_class> exact_square_function_squared(const ExactStepFunction& f) {
  const FiltrationTree& t = f.tree();
  const auto atoms = t.atoms();
  const auto avg = exact_atom_averages(f);
  std::vector<mpq_class> acc(atoms.size());
  acc[0] = 0;
  for (std::size_t i = 0; i < atoms.size(); ++i) {
    const Atom& a = atoms[i];
    for (std::uint32_t c = 0; c < a.child_count; ++c) {
      const AtomId cid = a.first_child + c;
      const mpq_class d = avg[cid] - avg[i];
      acc[cid] = acc[i] + d * d;
    }
  }
  std::vector<mpq_class> out(t.leaf_count());
  for (std::size_t leaf = 0; leaf < out.size(); ++leaf) out[leaf] = acc[t.leaf_atom(leaf)];
  return out;
}

mpq_class exact_distribution(const ExactStepFunction& f, const mpq_class& lambda) {
  const FiltrationTree& t = f.tree();
  mpq_class s = 0;
  for (std::size_t leaf = 0; leaf < t.leaf_count(); ++leaf) {
    if (f.values()[leaf] > lambda) s += t.exact_measure(t.leaf_atom(leaf));
  }
  return s;
}

}  // namespace sqfn
