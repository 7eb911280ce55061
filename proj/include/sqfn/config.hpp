#pragma once

// Experiment configuration. The file format is the flat subset of TOML used by
// the shipped configs: [tables], key = value, strings, integers, floats,
// booleans and (possibly multi-line) arrays of scalars. Inline tables, dotted
// keys and dates are rejected.

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <variant>
#include <vector>

#include "sqfn/error.hpp"

namespace sqfn {

class ConfigError : public PreconditionError {
 public:
  using PreconditionError::PreconditionError;
};

struct TomlValue;
using TomlArray = std::vector<TomlValue>;

struct TomlValue {
  std::variant<bool, std::int64_t, double, std::string, TomlArray> v;
};

/// Keys are "table.key", or "key" at top level.
class TomlDocument {
 public:
  [[nodiscard]] static TomlDocument parse(const std::string& text);
  [[nodiscard]] static TomlDocument load(const std::filesystem::path& path);

  [[nodiscard]] bool has(const std::string& key) const { return values_.count(key) != 0; }
  [[nodiscard]] const std::map<std::string, TomlValue>& values() const { return values_; }

  [[nodiscard]] std::int64_t get_int(const std::string& key, std::int64_t fallback) const;
  [[nodiscard]] double get_double(const std::string& key, double fallback) const;
  [[nodiscard]] bool get_bool(const std::string& key, bool fallback) const;
  [[nodiscard]] std::string get_string(const std::string& key, const std::string& fallback) const;
  [[nodiscard]] std::vector<double> get_doubles(const std::string& key, std::vector<double> fallback) const;
  [[nodiscard]] std::vector<std::string> get_strings(const std::string& key, std::vector<std::string> fallback) const;

 private:
  std::map<std::string, TomlValue> values_;
};

struct TreeSpec {
  std::string kind = "random";  // random | nadic
  double alpha_min = 0.05;
  double alpha_max = 0.5;
  int max_depth = 8;
  std::size_t max_leaves = std::size_t{1} << 16;
  int n = 2;      // nadic arity
  int depth = 8;  // nadic depth
};

struct FunctionSpec {
  std::string model = "random-haar-coefficients";
  double scale = 4.0;
  int weight_spikes = 4;
};

struct SharpnessSpec {
  double alpha = 1.0 / 16.0;
  double c = 1.2;
  std::vector<double> lambdas;
};

struct ExtrapolationSpec {
  double p = 2.0;
  double c_m = 2.0;
  std::vector<double> sharpness_alphas{0.25, 0.125};
  double kappa = 0.5;
};

struct CertificateSpec {
  std::vector<double> alphas;        // two-point lemma and optimal C grid
  int dzili_min = 2;
  int dzili_max = 100;
  std::size_t dzili_grid = 100000;
  std::size_t two_point_grid = 100000;
  std::size_t optimal_grid = 1000;
  double rm1_alpha = 1.0 / 1024.0;
  double series_eps = 1e-15;
};

struct ExperimentConfig {
  std::uint64_t seed = 1;
  int trials = 100;
  TreeSpec tree;
  FunctionSpec function;
  std::vector<std::string> suites;
  std::vector<double> lambda_factors{0.5, 1.0, 2.0, 4.0};
  std::vector<double> epsilons{0.25, 0.5, 0.75};
  std::vector<double> ps{0.5, 1.0, 2.0, 4.0};
  SharpnessSpec sharpness;
  ExtrapolationSpec extrapolation;
  CertificateSpec certificates;
  std::filesystem::path out_dir = ".";
  std::string report = "report.csv";
  std::string certs = "certs.json";
  std::string plot;  // empty: no plot
  std::string sharpness_csv = "sharpness.csv";
};

/// Known suite names, in report order.
[[nodiscard]] const std::vector<std::string>& known_suites();

/// Validates ranges and suite names; throws ConfigError.
[[nodiscard]] ExperimentConfig config_from_toml(const TomlDocument& doc);
[[nodiscard]] ExperimentConfig load_config(const std::filesystem::path& path);

}  // namespace sqfn
