#pragma once

#include <cstdint>
#include <ostream>
#include <string>
#include <vector>

#include "sqfn/certificates.hpp"
#include "sqfn/config.hpp"
#include "sqfn/constructions.hpp"
#include "sqfn/report.hpp"

namespace sqfn {

struct SuiteSummary {
  std::string name;
  std::size_t rows = 0;
  std::size_t failures = 0;
  std::size_t degenerate = 0;
};

struct OptimalCEntry {
  double alpha = 0.0;
  OptimalC result;
};

struct RunResult {
  std::vector<InequalityReport> reports;  // suite order, then trial, then row order
  std::vector<SuiteSummary> suites;
  std::vector<ScalarCertificate> certificates;
  std::vector<OptimalCEntry> optimal_c;
  SeriesConstant series;
  SharpnessSweep sharpness;
  bool has_sharpness = false;
  std::vector<std::string> failures;  // one line per failed row or uncertified certificate

  [[nodiscard]] int exit_code() const { return failures.empty() ? 0 : 1; }
};

/// Runs every suite in the config. Deterministic for a fixed config: trial
/// inputs derive from (seed, suite, trial) and results are collected by index.
[[nodiscard]] RunResult run_suites(const ExperimentConfig& config);

/// Writes report.csv, certs.json, the sharpness CSV and the optional SVG into config.out_dir.
void write_artifacts(const ExperimentConfig& config, const RunResult& result);

void write_sharpness_csv(std::ostream& os, const SharpnessSweep& sweep);

/// Log-measure of {f - E f > lambda} against the bound exp(-alpha lambda^2 / ||Sf||^2), over lambda^2.
void write_distribution_svg(std::ostream& os, const StepFunction& f, int points = 48);

/// Input of trial `trial` of `suite`, as used by the runner.
[[nodiscard]] StepFunction trial_function(const ExperimentConfig& config, const std::string& suite,
                                          std::uint64_t trial, bool centered);

}  // namespace sqfn
