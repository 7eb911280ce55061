#pragma once

// Rational-arithmetic counterparts of the operators, for trees carrying exact
// measures. Used to confirm closed forms without rounding.

#include <vector>

#include <gmpxx.h>

#include "sqfn/filtration.hpp"

namespace sqfn {

class ExactStepFunction {
 public:
  ExactStepFunction(TreePtr tree, std::vector<mpq_class> values);

  [[nodiscard]] const FiltrationTree& tree() const { return *tree_; }
  [[nodiscard]] const TreePtr& tree_ptr() const { return tree_; }
  [[nodiscard]] const std::vector<mpq_class>& values() const { return values_; }

 private:
  TreePtr tree_;
  std::vector<mpq_class> values_;
};

[[nodiscard]] std::vector<mpq_class> exact_atom_averages(const ExactStepFunction& f);

[[nodiscard]] mpq_class exact_integral(const ExactStepFunction& f);

/// (S f)^2 at every leaf.
[[nodiscard]] std::vector<mpq_class> exact_square_function_squared(const ExactStepFunction& f);

/// |{f > lambda}|.
[[nodiscard]] mpq_class exact_distribution(const ExactStepFunction& f, const mpq_class& lambda);

}  // namespace sqfn
