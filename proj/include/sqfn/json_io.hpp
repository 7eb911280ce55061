#pragma once

// JSON forms:
//   tree:      {"depth": N, "nodes": [{"level": k, "measure": m, "fraction": r,
//               "children": [ids], "exact": "p/q"}, ...]}   (nodes breadth-first)
//   function:  {"tree": <tree object or path>, "values": [...]}

#include <filesystem>

#include <json.hpp>

#include "sqfn/certificates.hpp"
#include "sqfn/operators.hpp"
#include "sqfn/report.hpp"

namespace sqfn {

using Json = nlohmann::ordered_json;

[[nodiscard]] Json tree_to_json(const FiltrationTree& tree);
[[nodiscard]] TreePtr tree_from_json(const Json& j);

[[nodiscard]] Json function_to_json(const StepFunction& f);

/// A string "tree" entry is a path, resolved relative to `base`.
[[nodiscard]] StepFunction function_from_json(const Json& j, const std::filesystem::path& base = {});

[[nodiscard]] Json read_json_file(const std::filesystem::path& path);
void write_json_file(const std::filesystem::path& path, const Json& j);

[[nodiscard]] StepFunction load_function(const std::filesystem::path& path);

[[nodiscard]] Json report_to_json(const InequalityReport& r);
[[nodiscard]] Json certificate_to_json(const ScalarCertificate& c);

}  // namespace sqfn
