#include "sqfn/config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace sqfn {

namespace {

class Parser {
 public:
  explicit Parser(const std::string& text) : s_(text) {}

  std::map<std::string, TomlValue> run() {
    std::map<std::string, TomlValue> out;
    std::set<std::string> tables;
    std::string table;
    while (true) {
      skip_blank_lines();
      if (at_end()) break;
      if (peek() == '[') {
        ++pos_;
        skip_spaces();
        table = bare_key();
        skip_spaces();
        expect(']');
        if (!tables.insert(table).second) fail("duplicate table [" + table + "]");
      } else {
        std::string key = bare_key();
        skip_spaces();
        expect('=');
        skip_spaces();
        TomlValue v = value();
        const std::string full = table.empty() ? key : table + "." + key;
        if (out.count(full)) fail("duplicate key '" + full + "'");
        out.emplace(full, std::move(v));
      }
      end_of_line();
    }
    return out;
  }

 private:
  [[noreturn]] void fail(const std::string& what) const {
    throw ConfigError("config line " + std::to_string(line_) + ": " + what);
  }

  bool at_end() const { return pos_ >= s_.size(); }
  char peek() const { return at_end() ? '\0' : s_[pos_]; }

  void skip_spaces() {
    while (!at_end() && (peek() == ' ' || peek() == '\t')) ++pos_;
  }

  void skip_comment() {
    if (peek() == '#') {
      while (!at_end() && peek() != '\n') ++pos_;
    }
  }

  // Whitespace, comments and newlines (used between statements and inside arrays).
  void skip_blank_lines() {
    while (!at_end()) {
      skip_spaces();
      skip_comment();
      if (peek() == '\r') ++pos_;
      if (peek() != '\n') return;
      ++pos_;
      ++line_;
    }
  }

  void end_of_line() {
    skip_spaces();
    skip_comment();
    if (peek() == '\r') ++pos_;
    if (at_end()) return;
    if (peek() != '\n') fail("unexpected trailing characters");
    ++pos_;
    ++line_;
  }

  void expect(char c) {
    if (peek() != c) fail(std::string("expected '") + c + "'");
    ++pos_;
  }

  std::string bare_key() {
    const std::size_t start = pos_;
    while (!at_end() && (std::isalnum(static_cast<unsigned char>(peek())) || peek() == '_' || peek() == '-')) ++pos_;
    if (pos_ == start) fail("expected a key");
    return s_.substr(start, pos_ - start);
  }

  TomlValue value() {
    const char c = peek();
    if (c == '"') return TomlValue{string_value()};
    if (c == '[') return TomlValue{array_value()};
    if (s_.compare(pos_, 4, "true") == 0) {
      pos_ += 4;
      return TomlValue{true};
    }
    if (s_.compare(pos_, 5, "false") == 0) {
      pos_ += 5;
      return TomlValue{false};
    }
    return number_value();
  }

  std::string string_value() {
    expect('"');
    std::string out;
    while (true) {
      if (at_end() || peek() == '\n') fail("unterminated string");
      const char c = s_[pos_++];
      if (c == '"') return out;
      if (c != '\\') {
        out.push_back(c);
        continue;
      }
      if (at_end()) fail("unterminated string");
      switch (s_[pos_++]) {
        case 'n':
          out.push_back('\n');
          break;
        case 't':
          out.push_back('\t');
          break;
        case '"':
          out.push_back('"');
          break;
        case '\\':
          out.push_back('\\');
          break;
        default:
          fail("unsupported escape sequence");
      }
    }
  }

  TomlArray array_value() {
    expect('[');
    TomlArray out;
    while (true) {
      skip_blank_lines();
      if (peek() == ']') {
        ++pos_;
        return out;
      }
      out.push_back(value());
      skip_blank_lines();
      if (peek() == ',') {
        ++pos_;
      } else if (peek() != ']') {
        fail("expected ',' or ']' in array");
      }
    }
  }

  TomlValue number_value() {
    const std::size_t start = pos_;
    while (!at_end() && (std::isalnum(static_cast<unsigned char>(peek())) || peek() == '+' || peek() == '-' ||
                         peek() == '.' || peek() == '_')) {
      ++pos_;
    }
    std::string tok = s_.substr(start, pos_ - start);
    if (tok.empty()) fail("expected a value");
    tok.erase(std::remove(tok.begin(), tok.end(), '_'), tok.end());
    if (tok.front() == '+') tok.erase(0, 1);
    const bool is_float = tok.find_first_of(".eE") != std::string::npos || tok == "inf" || tok == "-inf" ||
                          tok == "nan";
    const char* b = tok.data();
    const char* e = tok.data() + tok.size();
    if (is_float) {
      double d = 0.0;
      if (tok == "inf" || tok == "-inf") {
        d = tok == "inf" ? HUGE_VAL : -HUGE_VAL;
      } else {
        auto [p, ec] = std::from_chars(b, e, d);
        if (ec != std::errc() || p != e) fail("invalid number '" + tok + "'");
      }
      return TomlValue{d};
    }
    std::int64_t i = 0;
    auto [p, ec] = std::from_chars(b, e, i);
    if (ec != std::errc() || p != e) fail("invalid value '" + tok + "'");
    return TomlValue{i};
  }

  const std::string& s_;
  std::size_t pos_ = 0;
  int line_ = 1;
};

[[noreturn]] void type_error(const std::string& key, const char* want) {
  throw ConfigError("config key '" + key + "' must be " + want);
}

double as_double(const std::string& key, const TomlValue& v) {
  if (const auto* d = std::get_if<double>(&v.v)) return *d;
  if (const auto* i = std::get_if<std::int64_t>(&v.v)) return static_cast<double>(*i);
  type_error(key, "a number");
}

}  // namespace

TomlDocument TomlDocument::parse(const std::string& text) {
  TomlDocument doc;
  doc.values_ = Parser(text).run();
  return doc;
}

TomlDocument TomlDocument::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open config " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse(ss.str());
}

std::int64_t TomlDocument::get_int(const std::string& key, std::int64_t fallback) const {
  auto it = values_.find(key);
  if (it == values_.end()) return fallback;
  if (const auto* i = std::get_if<std::int64_t>(&it->second.v)) return *i;
  type_error(key, "an integer");
}

double TomlDocument::get_double(const std::string& key, double fallback) const {
  auto it = values_.find(key);
  return it == values_.end() ? fallback : as_double(key, it->second);
}

bool TomlDocument::get_bool(const std::string& key, bool fallback) const {
  auto it = values_.find(key);
  if (it == values_.end()) return fallback;
  if (const auto* b = std::get_if<bool>(&it->second.v)) return *b;
  type_error(key, "a boolean");
}

std::string TomlDocument::get_string(const std::string& key, const std::string& fallback) const {
  auto it = values_.find(key);
  if (it == values_.end()) return fallback;
  if (const auto* s = std::get_if<std::string>(&it->second.v)) return *s;
  type_error(key, "a string");
}

std::vector<double> TomlDocument::get_doubles(const std::string& key, std::vector<double> fallback) const {
  auto it = values_.find(key);
  if (it == values_.end()) return fallback;
  const auto* a = std::get_if<TomlArray>(&it->second.v);
  if (!a) type_error(key, "an array of numbers");
  std::vector<double> out;
  for (const auto& x : *a) out.push_back(as_double(key, x));
  return out;
}

std::vector<std::string> TomlDocument::get_strings(const std::string& key, std::vector<std::string> fallback) const {
  auto it = values_.find(key);
  if (it == values_.end()) return fallback;
  const auto* a = std::get_if<TomlArray>(&it->second.v);
  if (!a) type_error(key, "an array of strings");
  std::vector<std::string> out;
  for (const auto& x : *a) {
    const auto* s = std::get_if<std::string>(&x.v);
    if (!s) type_error(key, "an array of strings");
    out.push_back(*s);
  }
  return out;
}

const std::vector<std::string>& known_suites() {
  static const std::vector<std::string> names{
      "bellman",   "moment",     "distribution", "maximal",    "goodlambda", "modification", "weighted",
      "unweighted", "cww",       "w_of_e",       "ratios",     "extrapolation", "certificates", "sharpness"};
  return names;
}

namespace {

const std::set<std::string>& known_keys() {
  static const std::set<std::string> keys{
      "seed", "trials", "suites",
      "tree.kind", "tree.alpha_min", "tree.alpha_max", "tree.max_depth", "tree.max_leaves", "tree.n", "tree.depth",
      "function.model", "function.scale", "function.weight_spikes",
      "grids.lambda_factors", "grids.epsilon", "grids.p",
      "sharpness.alpha", "sharpness.c", "sharpness.lambdas",
      "extrapolation.p", "extrapolation.c_m", "extrapolation.sharpness_alphas", "extrapolation.kappa",
      "certificates.alphas", "certificates.dzili_min", "certificates.dzili_max", "certificates.dzili_grid",
      "certificates.two_point_grid", "certificates.optimal_grid", "certificates.rm1_alpha",
      "certificates.series_eps",
      "output.dir", "output.report", "output.certs", "output.plot", "output.sharpness"};
  return keys;
}

void require(bool ok, const std::string& what) {
  if (!ok) throw ConfigError("invalid config: " + what);
}

int positive_int(const TomlDocument& d, const std::string& key, int fallback) {
  const auto v = d.get_int(key, fallback);
  require(v >= 1 && v <= (1 << 30), key + " must be a positive integer");
  return static_cast<int>(v);
}

}  // namespace

ExperimentConfig config_from_toml(const TomlDocument& d) {
  for (const auto& [k, v] : d.values()) {
    (void)v;
    require(known_keys().count(k) != 0, "unknown key '" + k + "'");
  }
  ExperimentConfig c;
  const auto seed = d.get_int("seed", 1);
  require(seed >= 0, "seed must be nonnegative");
  c.seed = static_cast<std::uint64_t>(seed);
  c.trials = positive_int(d, "trials", c.trials);

  c.tree.kind = d.get_string("tree.kind", c.tree.kind);
  require(c.tree.kind == "random" || c.tree.kind == "nadic", "tree.kind must be 'random' or 'nadic'");
  c.tree.alpha_min = d.get_double("tree.alpha_min", c.tree.alpha_min);
  c.tree.alpha_max = d.get_double("tree.alpha_max", c.tree.alpha_max);
  require(c.tree.alpha_min > 0 && c.tree.alpha_min <= c.tree.alpha_max && c.tree.alpha_max <= 0.5,
          "tree alpha range must satisfy 0 < alpha_min <= alpha_max <= 0.5");
  c.tree.max_depth = positive_int(d, "tree.max_depth", c.tree.max_depth);
  c.tree.max_leaves = static_cast<std::size_t>(positive_int(d, "tree.max_leaves", static_cast<int>(c.tree.max_leaves)));
  c.tree.n = positive_int(d, "tree.n", c.tree.n);
  c.tree.depth = positive_int(d, "tree.depth", c.tree.depth);
  require(c.tree.kind != "nadic" || c.tree.n >= 2, "tree.n must be >= 2");

  c.function.model = d.get_string("function.model", c.function.model);
  require(c.function.model == "gaussian-leaves" || c.function.model == "random-haar-coefficients" ||
              c.function.model == "spike",
          "unknown function.model '" + c.function.model + "'");
  c.function.scale = d.get_double("function.scale", c.function.scale);
  require(c.function.scale > 0 && std::isfinite(c.function.scale), "function.scale must be positive");
  c.function.weight_spikes = positive_int(d, "function.weight_spikes", c.function.weight_spikes);

  c.suites = d.get_strings("suites", known_suites());
  require(!c.suites.empty(), "suites must not be empty");
  for (const auto& s : c.suites) {
    require(std::find(known_suites().begin(), known_suites().end(), s) != known_suites().end(),
            "unknown suite '" + s + "'");
  }

  c.lambda_factors = d.get_doubles("grids.lambda_factors", c.lambda_factors);
  c.epsilons = d.get_doubles("grids.epsilon", c.epsilons);
  c.ps = d.get_doubles("grids.p", c.ps);
  for (double x : c.lambda_factors) require(x > 0 && std::isfinite(x), "lambda factors must be positive");
  for (double x : c.epsilons) require(x > 0 && x < 1, "epsilon values must lie in (0, 1)");
  for (double x : c.ps) require(x > 0 && std::isfinite(x), "p values must be positive");

  c.sharpness.alpha = d.get_double("sharpness.alpha", c.sharpness.alpha);
  c.sharpness.c = d.get_double("sharpness.c", c.sharpness.c);
  c.sharpness.lambdas = d.get_doubles("sharpness.lambdas", c.sharpness.lambdas);
  require(c.sharpness.alpha > 0 && c.sharpness.alpha <= 0.5, "sharpness.alpha must lie in (0, 0.5]");
  require(c.sharpness.c > 1, "sharpness.c must exceed 1");
  for (double x : c.sharpness.lambdas) require(x > 0 && std::isfinite(x), "sharpness lambdas must be positive");

  c.extrapolation.p = d.get_double("extrapolation.p", c.extrapolation.p);
  c.extrapolation.c_m = d.get_double("extrapolation.c_m", c.extrapolation.c_m);
  c.extrapolation.sharpness_alphas = d.get_doubles("extrapolation.sharpness_alphas", c.extrapolation.sharpness_alphas);
  c.extrapolation.kappa = d.get_double("extrapolation.kappa", c.extrapolation.kappa);
  require(c.extrapolation.p >= 2 && std::isfinite(c.extrapolation.p), "extrapolation.p must be finite and >= 2");
  require(c.extrapolation.c_m >= 1, "extrapolation.c_m must be >= 1");
  require(c.extrapolation.kappa > 0, "extrapolation.kappa must be positive");
  for (double x : c.extrapolation.sharpness_alphas) require(x > 0 && x <= 0.5, "sharpness alphas must lie in (0, 0.5]");

  std::vector<double> alphas;
  for (int i = 1; i <= 10; ++i) alphas.push_back(0.05 * i);
  c.certificates.alphas = d.get_doubles("certificates.alphas", alphas);
  for (double x : c.certificates.alphas) require(x > 0 && x <= 0.5, "certificate alphas must lie in (0, 0.5]");
  c.certificates.dzili_min = positive_int(d, "certificates.dzili_min", c.certificates.dzili_min);
  c.certificates.dzili_max = positive_int(d, "certificates.dzili_max", c.certificates.dzili_max);
  require(c.certificates.dzili_min >= 2 && c.certificates.dzili_min <= c.certificates.dzili_max,
          "dzili range must satisfy 2 <= dzili_min <= dzili_max");
  c.certificates.dzili_grid =
      static_cast<std::size_t>(positive_int(d, "certificates.dzili_grid", static_cast<int>(c.certificates.dzili_grid)));
  require(c.certificates.dzili_grid >= 1000, "certificates.dzili_grid must be >= 1000");
  c.certificates.two_point_grid = static_cast<std::size_t>(
      positive_int(d, "certificates.two_point_grid", static_cast<int>(c.certificates.two_point_grid)));
  c.certificates.optimal_grid = static_cast<std::size_t>(
      positive_int(d, "certificates.optimal_grid", static_cast<int>(c.certificates.optimal_grid)));
  c.certificates.rm1_alpha = d.get_double("certificates.rm1_alpha", c.certificates.rm1_alpha);
  require(c.certificates.rm1_alpha > 0 && c.certificates.rm1_alpha <= 0.5, "certificates.rm1_alpha must lie in (0, 0.5]");
  c.certificates.series_eps = d.get_double("certificates.series_eps", c.certificates.series_eps);
  require(c.certificates.series_eps > 0 && c.certificates.series_eps < 1, "certificates.series_eps must lie in (0, 1)");

  c.out_dir = d.get_string("output.dir", ".");
  c.report = d.get_string("output.report", c.report);
  c.certs = d.get_string("output.certs", c.certs);
  c.plot = d.get_string("output.plot", c.plot);
  c.sharpness_csv = d.get_string("output.sharpness", c.sharpness_csv);
  require(!c.report.empty(), "output.report must not be empty");
  return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) { return config_from_toml(TomlDocument::load(path)); }

}  // namespace sqfn
