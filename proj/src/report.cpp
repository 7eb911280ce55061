#include "sqfn/report.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>

namespace sqfn {

void finalize_strict(InequalityReport& r) {
  r.mode = ReportMode::StrictBound;
  r.margin = r.rhs - r.lhs;
  r.tolerance = kTolerance * std::max(std::abs(r.rhs), 1.0);
  r.status = r.margin >= -r.tolerance ? ReportStatus::Pass : ReportStatus::Fail;
}

void finalize_ratio(InequalityReport& r) {
  r.mode = ReportMode::Ratio;
  r.margin = r.rhs - r.lhs;
  r.tolerance = 0.0;
  r.status = ReportStatus::Ratio;
}

void mark_degenerate(InequalityReport& r, std::string note) {
  r.status = ReportStatus::Degenerate;
  r.note = std::move(note);
}

const char* to_string(ReportMode m) { return m == ReportMode::StrictBound ? "strict-bound" : "ratio"; }

const char* to_string(ReportStatus s) {
  switch (s) {
    case ReportStatus::Pass:
      return "true";
    case ReportStatus::Fail:
      return "false";
    case ReportStatus::Degenerate:
      return "degenerate";
    case ReportStatus::Ratio:
      return "";
  }
  return "";
}

std::string format_double(double v) {
  if (std::isnan(v)) return "";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

void write_csv_row(std::ostream& os, const InequalityReport& r) {
  os << r.name << ',' << format_double(r.alpha) << ',' << format_double(r.lambda) << ','
     << format_double(r.epsilon) << ',' << format_double(r.p) << ',' << format_double(r.lhs) << ','
     << format_double(r.rhs) << ',' << format_double(r.margin) << ',' << to_string(r.mode) << ','
     << to_string(r.status) << '\n';
}

void write_csv(std::ostream& os, const std::vector<InequalityReport>& reports) {
  os << kCsvHeader << '\n';
  for (const auto& r : reports) write_csv_row(os, r);
}

}  // namespace sqfn
