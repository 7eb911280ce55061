#include "sqfn/random.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "sqfn/error.hpp"

namespace sqfn {

namespace {

std::vector<double> dirichlet_fractions(std::mt19937_64& rng, int k, double floor) {
  std::exponential_distribution<double> ex(1.0);
  std::vector<double> x(static_cast<std::size_t>(k));
  double total = 0.0;
  for (double& v : x) total += (v = ex(rng));
  const double spare = 1.0 - k * floor;
  double sum = 0.0;
  for (double& v : x) sum += (v = floor + spare * v / total);
  // Put the rounding residue on the largest entry so the fractions sum to 1.
  auto it = std::max_element(x.begin(), x.end());
  *it += 1.0 - sum;
  return x;
}

}  // namespace

TreePtr random_tree(std::uint64_t seed, const RandomTreeOptions& opt) {
  if (!(opt.alpha_min > 0.0 && opt.alpha_min <= opt.alpha_max && opt.alpha_max <= 0.5)) {
    throw PreconditionError("random tree alpha range must satisfy 0 < alpha_min <= alpha_max <= 1/2");
  }
  std::mt19937_64 rng(seed);
  const int depth = std::uniform_int_distribution<int>(1, std::max(1, opt.max_depth))(rng);
  std::size_t leaves = 1;
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  return build_custom(depth, [&](const AtomInfo& info) -> std::vector<double> {
    if (info.level > 0 && unit(rng) < opt.terminal_probability) return {};
    const double a = opt.alpha_min + (opt.alpha_max - opt.alpha_min) * unit(rng);
    const int kmax = std::clamp(static_cast<int>(std::floor(1.0 / a + 1e-12)), 2, 4);
    const int k = std::uniform_int_distribution<int>(2, kmax)(rng);
    if (leaves + static_cast<std::size_t>(k - 1) > opt.max_leaves) return {};
    leaves += static_cast<std::size_t>(k - 1);
    return dirichlet_fractions(rng, k, a);
  });
}

TreePtr random_small_tree(std::uint64_t seed, std::size_t max_leaves, int max_depth) {
  std::mt19937_64 rng(seed);
  const int depth = std::uniform_int_distribution<int>(1, std::max(1, max_depth))(rng);
  std::size_t leaves = 1;
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  return build_custom(depth, [&](const AtomInfo& info) -> std::vector<double> {
    if (info.level > 0 && unit(rng) < 0.15) return {};
    const int k = std::uniform_int_distribution<int>(1, 4)(rng);
    if (leaves + static_cast<std::size_t>(k - 1) > max_leaves) return {};
    leaves += static_cast<std::size_t>(k - 1);
    return dirichlet_fractions(rng, k, 0.02);
  });
}

FunctionModel parse_model(std::string_view name) {
  if (name == "gaussian-leaves") return FunctionModel::GaussianLeaves;
  if (name == "random-haar-coefficients" || name == "random-haar") return FunctionModel::RandomHaar;
  if (name == "spike") return FunctionModel::Spike;
  throw PreconditionError("unknown function model '" + std::string(name) + "'");
}

std::string_view model_name(FunctionModel m) {
  switch (m) {
    case FunctionModel::GaussianLeaves:
      return "gaussian-leaves";
    case FunctionModel::RandomHaar:
      return "random-haar-coefficients";
    case FunctionModel::Spike:
      return "spike";
  }
  return "";
}

StepFunction random_function(const TreePtr& tree, std::uint64_t seed, FunctionModel model, double scale) {
  if (!tree) throw PreconditionError("random_function needs a tree");
  std::mt19937_64 rng(seed);
  const std::size_t n = tree->leaf_count();
  std::vector<double> v(n, 0.0);
  switch (model) {
    case FunctionModel::GaussianLeaves: {
      std::normal_distribution<double> nd(0.0, 1.0);
      for (double& x : v) x = nd(rng);
      break;
    }
    case FunctionModel::Spike: {
      const auto leaf = std::uniform_int_distribution<std::size_t>(0, n - 1)(rng);
      v[leaf] = scale;
      break;
    }
    case FunctionModel::RandomHaar: {
      const auto atoms = tree->atoms();
      const double bound = scale / std::sqrt(std::max(1, tree->depth()));
      std::uniform_real_distribution<double> unit(0.0, 1.0);
      std::vector<double> val(atoms.size(), 0.0);
      std::vector<double> d;
      for (std::size_t i = 0; i < atoms.size(); ++i) {
        const Atom& a = atoms[i];
        if (a.child_count == 0) continue;
        d.assign(a.child_count, 0.0);
        if (a.child_count >= 2) {
          double mean = 0.0;
          for (std::uint32_t c = 0; c < a.child_count; ++c) {
            d[c] = 2.0 * unit(rng) - 1.0;
            mean += atoms[a.first_child + c].fraction * d[c];
          }
          double peak = 0.0;
          for (double& x : d) peak = std::max(peak, std::abs(x -= mean));
          const double amp = bound * unit(rng);
          if (peak > 0.0) {
            for (double& x : d) x *= amp / peak;
          }
        }
        for (std::uint32_t c = 0; c < a.child_count; ++c) val[a.first_child + c] = val[i] + d[c];
      }
      for (std::size_t leaf = 0; leaf < n; ++leaf) v[leaf] = val[tree->leaf_atom(leaf)];
      break;
    }
  }
  return StepFunction(tree, std::move(v));
}

StepFunction random_spike_weight(const TreePtr& tree, std::uint64_t seed, int spikes) {
  std::mt19937_64 rng(seed);
  const std::size_t n = tree->leaf_count();
  std::vector<double> v(n, 0.1);
  std::uniform_int_distribution<std::size_t> pick(0, n - 1);
  std::uniform_real_distribution<double> height(0.0, std::log(100.0));
  for (int s = 0; s < spikes; ++s) v[pick(rng)] += std::exp(height(rng));
  return StepFunction(tree, std::move(v));
}

}  // namespace sqfn
