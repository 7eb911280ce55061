#include "sqfn/constructions.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <string>

#include "sqfn/error.hpp"

namespace sqfn {

TreePtr build_dyadic_square_tree(int depth) {
  if (depth < 1) throw PreconditionError("depth must be >= 1");
  return build_nadic(4, depth);
}

std::pair<std::uint32_t, std::uint32_t> square_cell(std::size_t leaf, int depth) {
  std::uint32_t x1 = 0;
  std::uint32_t x2 = 0;
  for (int level = 0; level < depth; ++level) {
    const auto digit = static_cast<std::uint32_t>((leaf >> (2 * (depth - 1 - level))) & 3u);
    x1 = (x1 << 1) | (digit >> 1);
    x2 = (x2 << 1) | (digit & 1u);
  }
  return {x1, x2};
}

StepFunction build_example_2d(int k_max) {
  if (k_max < 1) throw PreconditionError("k_max must be >= 1");
  if (k_max > 12) throw SizeError("4^k_max leaves exceed the leaf limit");
  TreePtr tree = build_dyadic_square_tree(k_max);
  std::vector<double> v(tree->leaf_count(), 0.0);
  for (std::size_t leaf = 0; leaf < v.size(); ++leaf) {
    const auto [x1, x2] = square_cell(leaf, k_max);
    if (x1 == 0) continue;
    // x1 lies in the right half of [0, 2^-k) for exactly one k.
    const int top = static_cast<int>(std::bit_width(x1)) - 1;  // x1 in [2^top, 2^(top+1))
    const int k = k_max - 1 - top;
    v[leaf] = ((x2 >> (k_max - k - 1)) & 1u) ? 1.0 : -1.0;
  }
  return StepFunction(std::move(tree), std::move(v));
}

bool is_example_square(const FiltrationTree& tree, AtomId id) {
  const Atom& a = tree.atom(id);
  if (a.is_leaf()) return false;
  // The first leaf of a level-k square has x1 cell 0 exactly when x1 starts at 0.
  const int depth = tree.depth();
  const auto [x1, x2] = square_cell(a.leaf_begin, depth);
  (void)x2;
  return x1 == 0;
}

mpq_class sharpness_sup_sg_squared(const mpq_class& alpha, int N) {
  const mpq_class r = (1 - alpha) / alpha;
  return mpq_class(N - 1) + r * r;
}

namespace {

SharpnessFamily build(const mpq_class& alpha_q, int N) {
  const double alpha = alpha_q.get_d();
  if (!(alpha_q > 0 && alpha_q <= mpq_class(1, 2))) throw PreconditionError("alpha must lie in (0, 1/2]");
  if (N < 1) throw PreconditionError("N must be >= 1");
  const std::vector<mpq_class> split{alpha_q, 1 - alpha_q};
  // Only the rightmost atom of each level splits; index_in_level counts the
  // atoms created at that level, so the rightmost one is index 1 (index 0 at the root).
  TreePtr tree = build_custom_exact(N, [&](const AtomInfo& info) {
    const bool is_e_k = info.level == 0 || info.index_in_level == 1;
    return is_e_k ? split : std::vector<mpq_class>{};
  });

  const mpq_class down = -(1 - alpha_q) / alpha_q;
  std::vector<mpq_class> exact(tree->leaf_count());
  std::vector<double> v(tree->leaf_count());
  for (std::size_t leaf = 0; leaf < exact.size(); ++leaf) {
    const Atom& a = tree->atom(tree->leaf_atom(leaf));
    // Leaf at level k+1 on the left is E_k^alpha; the last leaf is E_N.
    exact[leaf] = leaf + 1 == exact.size() ? mpq_class(N) : mpq_class(a.level - 1) + down;
    v[leaf] = exact[leaf].get_d();
  }
  SharpnessFamily fam{alpha, N, tree, StepFunction(tree, std::move(v)), std::nullopt, alpha_q, 0.0, std::nullopt};
  fam.g_exact.emplace(tree, std::move(exact));
  fam.alpha_exact = alpha_q;
  fam.sup_sg = std::sqrt(sharpness_sup_sg_squared(alpha_q, N).get_d());
  return fam;
}

}  // namespace

SharpnessFamily build_sharpness(const mpq_class& alpha, int N) { return build(alpha, N); }

SharpnessFamily build_sharpness(double alpha, int N) {
  if (!(alpha > 0.0 && alpha <= 0.5)) throw PreconditionError("alpha must lie in (0, 1/2]");
  return build(mpq_class(alpha), N);
}

int n_of_lambda(double alpha, double lambda) {
  if (!(alpha > 0.0 && alpha <= 0.5)) throw PreconditionError("alpha must lie in (0, 1/2]");
  if (!(lambda > 0.0)) throw PreconditionError("lambda must be positive");
  const double r = (1.0 - alpha) / alpha;
  constexpr int kMaxN = 1 << 22;
  for (int n = 1; n <= kMaxN; ++n) {
    if (n / std::sqrt(n - 1.0 + r * r) >= lambda) return n;
  }
  throw ResolutionError("N(lambda) exceeds " + std::to_string(kMaxN));
}

SharpnessFamily build_f_lambda(double alpha, double lambda) {
  const int n = n_of_lambda(alpha, lambda);
  if (!(n > 1.0 / (alpha * alpha))) {
    throw ResolutionError("lambda = " + std::to_string(lambda) + " gives N(lambda) = " + std::to_string(n) +
                          ", not above 1/alpha^2 = " + std::to_string(1.0 / (alpha * alpha)));
  }
  SharpnessFamily fam = build_sharpness(alpha, n);
  fam.lambda = lambda;
  fam.n_of_lambda = n;
  fam.f_lambda = (1.0 / fam.sup_sg) * fam.g;
  return fam;
}

SharpnessPoint sharpness_point(double alpha, double lambda, double c) {
  const SharpnessFamily fam = build_f_lambda(alpha, lambda);
  SharpnessPoint pt;
  pt.lambda = lambda;
  pt.N = fam.n_of_lambda;
  pt.log_measure = log_distribution(*fam.f_lambda, lambda * (1.0 - 1e-6));
  pt.measure = std::exp(pt.log_measure);
  pt.log_bound = -c * alpha * lambda * lambda;
  pt.bound = std::exp(pt.log_bound);
  pt.ratio = pt.log_measure / (-alpha * lambda * lambda);
  return pt;
}

SharpnessSweep sharpness_sweep(double alpha, std::span<const double> lambdas, double c) {
  SharpnessSweep out;
  for (double lambda : lambdas) {
    try {
      out.points.push_back(sharpness_point(alpha, lambda, c));
    } catch (const ResolutionError&) {
    }
  }
  std::vector<const SharpnessPoint*> sorted;
  for (const auto& pt : out.points) sorted.push_back(&pt);
  std::stable_sort(sorted.begin(), sorted.end(), [](auto* a, auto* b) { return a->lambda < b->lambda; });
  // Walk down from the largest lambda while the bound stays exceeded.
  for (std::size_t i = sorted.size(); i-- > 0;) {
    if (!sorted[i]->exceeds_bound()) break;
    out.lambda0 = sorted[i]->lambda;
    ++out.above_lambda0;
  }
  return out;
}

}  // namespace sqfn
