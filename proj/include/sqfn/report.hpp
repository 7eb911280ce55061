#pragma once

#include <cmath>
#include <limits>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

namespace sqfn {

enum class ReportMode { StrictBound, Ratio };

enum class ReportStatus {
  Pass,
  Fail,
  Degenerate,  // the statement's hypothesis is not met; flagged, not counted as a failure
  Ratio,       // no pass/fail for ratio-mode statements
};

inline constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

/// Relative tolerance of strict-bound checks: pass iff margin >= -kTolerance * max(|rhs|, 1).
inline constexpr double kTolerance = 1e-9;

struct InequalityReport {
  std::string name;
  double alpha = kNaN;
  double lambda = kNaN;
  double epsilon = kNaN;
  double p = kNaN;
  double lhs = 0.0;
  double rhs = 0.0;
  double margin = 0.0;  // rhs - lhs
  ReportMode mode = ReportMode::StrictBound;
  ReportStatus status = ReportStatus::Pass;
  double tolerance = 0.0;
  std::string note;
  std::vector<std::pair<std::string, double>> extras;  // characteristics and constants used

  [[nodiscard]] bool failed() const { return status == ReportStatus::Fail; }
  [[nodiscard]] double ratio() const { return rhs != 0.0 ? lhs / rhs : (lhs == 0.0 ? 0.0 : kNaN); }
};

/// Fills margin, tolerance and status of a strict-bound report from lhs and rhs.
void finalize_strict(InequalityReport& r);

/// Fills margin and marks the report as ratio-mode.
void finalize_ratio(InequalityReport& r);

/// Marks a report as degenerate with the given note.
void mark_degenerate(InequalityReport& r, std::string note);

[[nodiscard]] const char* to_string(ReportMode m);
[[nodiscard]] const char* to_string(ReportStatus s);

/// Shortest round-trip decimal for a double; empty for NaN.
[[nodiscard]] std::string format_double(double v);

inline constexpr const char* kCsvHeader = "name,alpha,lambda,epsilon,p,lhs,rhs,margin,mode,pass";

void write_csv_row(std::ostream& os, const InequalityReport& r);
void write_csv(std::ostream& os, const std::vector<InequalityReport>& reports);

}  // namespace sqfn
