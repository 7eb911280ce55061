#pragma once

#include <cstdint>
#include <string>
#include <string_view>

#include "sqfn/operators.hpp"

namespace sqfn {

struct RandomTreeOptions {
  double alpha_min = 0.05;
  double alpha_max = 0.5;
  int max_depth = 8;
  std::size_t max_leaves = std::size_t{1} << 16;
  double terminal_probability = 0.05;  // chance that a non-root atom stops splitting early
};

/// Random alpha-homogeneous tree: each splitting atom draws alpha_t uniformly
/// from [alpha_min, alpha_max], a child count k in [2, min(4, floor(1/alpha_t))]
/// and fractions alpha_t + (1 - k alpha_t) * Dirichlet(1). Levels stop splitting
/// once the leaf budget would be exceeded.
[[nodiscard]] TreePtr random_tree(std::uint64_t seed, const RandomTreeOptions& opt = {});

/// Random n-adic or mixed-arity tree for oracle tests (alpha is not controlled).
[[nodiscard]] TreePtr random_small_tree(std::uint64_t seed, std::size_t max_leaves, int max_depth);

enum class FunctionModel { GaussianLeaves, RandomHaar, Spike };

[[nodiscard]] FunctionModel parse_model(std::string_view name);
[[nodiscard]] std::string_view model_name(FunctionModel m);

/// Deterministic random function on a tree.
///  - gaussian-leaves: independent N(0, 1) leaf values;
///  - random-haar-coefficients: each Delta_Q gets independent zero-mean child
///    values with sup at most `scale` / sqrt(depth), so ||Sf||_inf <= scale;
///    the mean is 0;
///  - spike: `scale` times the indicator of one random leaf.
[[nodiscard]] StepFunction random_function(const TreePtr& tree, std::uint64_t seed, FunctionModel model,
                                           double scale = 4.0);

/// Positive weight: 0.1 + sum of a few random leaf spikes of random height.
[[nodiscard]] StepFunction random_spike_weight(const TreePtr& tree, std::uint64_t seed, int spikes = 4);

}  // namespace sqfn
