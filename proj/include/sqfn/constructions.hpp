#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>
#include <utility>

#include <gmpxx.h>

#include "sqfn/exact.hpp"
#include "sqfn/operators.hpp"

namespace sqfn {

/// Dyadic squares of [0,1)^2 as a 4-ary tree of the given depth. Child index
/// 2*b1 + b2 holds the next binary digit b1 of x1 and b2 of x2.
[[nodiscard]] TreePtr build_dyadic_square_tree(int depth);

/// (x1 cell, x2 cell) of a leaf of build_dyadic_square_tree, each in [0, 2^depth).
[[nodiscard]] std::pair<std::uint32_t, std::uint32_t> square_cell(std::size_t leaf, int depth);

/// f = sum over squares Q = [0, 2^-k) x I (|I| = 2^-k, k = 0..k_max-1) of
/// 1_{right half of [0,2^-k)}(x1) h_I(x2), on the square tree of depth k_max.
[[nodiscard]] StepFunction build_example_2d(int k_max);

/// True when the atom is one of the squares [0, 2^-k) x I of the example.
[[nodiscard]] bool is_example_square(const FiltrationTree& tree, AtomId id);

struct SharpnessFamily {
  double alpha = 0.0;
  int N = 0;
  TreePtr tree;
  StepFunction g;                            // g_N
  std::optional<ExactStepFunction> g_exact;  // g_N in rational arithmetic
  mpq_class alpha_exact;
  double sup_sg = 0.0;  // ||S g_N||_inf
  std::optional<StepFunction> f_lambda;  // g_N / ||S g_N||_inf when built from lambda
  double lambda = 0.0;
  int n_of_lambda = 0;
};

/// ||S g_N||_inf^2 = N - 1 + (1-alpha)^2 / alpha^2.
[[nodiscard]] mpq_class sharpness_sup_sg_squared(const mpq_class& alpha, int N);

/// Sets E_k split by (alpha, 1-alpha) at every level: E_k^alpha is the leftmost
/// (terminal) child, E_(k+1) = E_k^beta; g_N = sum_{k<N} d_k with
/// d_k = 1 on E_k^beta and -(1-alpha)/alpha on E_k^alpha. The double alpha is
/// converted exactly to a rational for the exact copy.
[[nodiscard]] SharpnessFamily build_sharpness(double alpha, int N);
[[nodiscard]] SharpnessFamily build_sharpness(const mpq_class& alpha, int N);

/// Smallest N with N / ||S g_N||_inf >= lambda.
[[nodiscard]] int n_of_lambda(double alpha, double lambda);

/// Sharpness family at N(lambda) with f_lambda = g_N / ||S g_N||_inf. Throws
/// ResolutionError unless N(lambda) > 1/alpha^2.
[[nodiscard]] SharpnessFamily build_f_lambda(double alpha, double lambda);

struct SharpnessPoint {
  double lambda = 0.0;
  int N = 0;
  double measure = 0.0;      // |{f_lambda > lambda (1 - 1e-6)}|
  double log_measure = 0.0;
  double bound = 0.0;        // exp(-c alpha lambda^2)
  double log_bound = 0.0;
  double ratio = 0.0;        // ln(measure) / (-alpha lambda^2)
  [[nodiscard]] bool exceeds_bound() const { return log_measure > log_bound; }
};

[[nodiscard]] SharpnessPoint sharpness_point(double alpha, double lambda, double c);

struct SharpnessSweep {
  std::vector<SharpnessPoint> points;  // in the order of the requested lambdas
  double lambda0 = 0.0;  // smallest tested lambda from which every larger one exceeds the bound; 0 if none
  int above_lambda0 = 0;  // tested lambdas >= lambda0
};

/// Points that throw ResolutionError (N(lambda) <= 1/alpha^2) are skipped.
[[nodiscard]] SharpnessSweep sharpness_sweep(double alpha, std::span<const double> lambdas, double c);

}  // namespace sqfn
