#pragma once

// Flat `key = value` experiment configuration: one assignment per line, `#`
// starts a comment, lists are comma separated.

#include <chaos_forge/errors.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <system_error>
#include <utility>
#include <vector>

namespace chaos_forge::cli {

enum class ExperimentKind { fourth_moment_corpus, fbm_rates, stein_bounds, laguerre_suite, duality_suite };

enum class OutputFormat { csv, json };

inline const std::vector<std::pair<ExperimentKind, std::string>>& experiment_kinds() {
  static const std::vector<std::pair<ExperimentKind, std::string>> kinds{
      {ExperimentKind::fourth_moment_corpus, "fourth-moment-corpus"},
      {ExperimentKind::fbm_rates, "fbm-rates"},
      {ExperimentKind::stein_bounds, "stein-bounds"},
      {ExperimentKind::laguerre_suite, "laguerre-suite"},
      {ExperimentKind::duality_suite, "duality-suite"},
  };
  return kinds;
}

inline std::string to_string(ExperimentKind k) {
  for (const auto& [kind, name] : experiment_kinds())
    if (kind == k) return name;
  return "unknown";
}

inline std::optional<ExperimentKind> experiment_from_string(std::string_view s) {
  for (const auto& [kind, name] : experiment_kinds())
    if (name == s) return kind;
  return std::nullopt;
}

inline std::string to_string(OutputFormat f) { return f == OutputFormat::csv ? "csv" : "json"; }

struct ExperimentConfig {
  ExperimentKind experiment = ExperimentKind::fourth_moment_corpus;
  std::uint64_t seed = 42;
  std::vector<int> k{2, 3};
  std::size_t d = 3;
  std::size_t count = 50;
  std::vector<double> H{0.55, 0.70};
  std::vector<std::size_t> n{128, 256, 512, 1024, 2048};
  std::size_t samples = 0;
  std::vector<double> nu{0.0, 0.5, 2.0};
  int degree = 3;
  std::optional<std::string> output;
  OutputFormat format = OutputFormat::csv;
};

namespace detail {

inline std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

inline std::vector<std::string_view> split_list(std::string_view v) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto comma = v.find(',', start);
    out.push_back(trim(v.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

template <class T>
T parse_number(std::string_view s, std::size_t line, const std::string& key) {
  T value{};
  if (s.empty()) throw ParseError(line, "empty value for '" + key + "'");
  if constexpr (std::is_unsigned_v<T>) {
    if (s.front() == '-') throw ConfigRangeError(key, "must be nonnegative");
  }
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec == std::errc::result_out_of_range) throw ConfigRangeError(key, "value '" + std::string(s) + "' overflows");
  if (ec != std::errc() || ptr != s.data() + s.size())
    throw ParseError(line, "malformed number '" + std::string(s) + "' for '" + key + "'");
  if constexpr (std::is_floating_point_v<T>) {
    if (!std::isfinite(value)) throw ConfigRangeError(key, "must be finite");
  }
  return value;
}

template <class T>
std::vector<T> parse_list(std::string_view v, std::size_t line, const std::string& key) {
  std::vector<T> out;
  for (auto item : split_list(v)) out.push_back(parse_number<T>(item, line, key));
  return out;
}

/// Keys each experiment accepts beyond experiment, seed, output and format.
inline const std::set<std::string>& applicable_keys(ExperimentKind kind) {
  static const std::map<ExperimentKind, std::set<std::string>> keys{
      {ExperimentKind::fourth_moment_corpus, {"k", "d", "count"}},
      {ExperimentKind::fbm_rates, {"H", "n", "samples"}},
      {ExperimentKind::stein_bounds, {}},
      {ExperimentKind::laguerre_suite, {"nu", "d", "degree", "count"}},
      {ExperimentKind::duality_suite, {"d", "degree", "count"}},
  };
  return keys.at(kind);
}

inline const std::set<std::string>& known_keys() {
  static const std::set<std::string> keys{"experiment", "seed", "output", "format", "k",  "d",
                                          "count",      "H",    "n",      "samples", "nu", "degree"};
  return keys;
}

inline void require(bool ok, const std::string& key, const std::string& what) {
  if (!ok) throw ConfigRangeError(key, what);
}

}  // namespace detail

/// Per-experiment defaults before any key from the text is applied.
inline ExperimentConfig default_config(ExperimentKind kind) {
  ExperimentConfig c;
  c.experiment = kind;
  switch (kind) {
    case ExperimentKind::laguerre_suite:
    case ExperimentKind::duality_suite:
      c.count = 100;
      break;
    default:
      break;
  }
  return c;
}

/// Checks every field against its desk-scale range; throws ConfigRangeError naming the key.
inline void validate(const ExperimentConfig& c) {
  using detail::require;
  switch (c.experiment) {
    case ExperimentKind::fourth_moment_corpus:
      require(!c.k.empty(), "k", "at least one order required");
      for (int k : c.k) require(k >= 2 && k <= 4, "k", "orders must lie in [2, 4]");
      require(c.d >= 1 && c.d <= 4, "d", "must lie in [1, 4]");
      require(c.count >= 1 && c.count <= 10000, "count", "must lie in [1, 10000]");
      break;
    case ExperimentKind::fbm_rates: {
      require(!c.H.empty(), "H", "at least one Hurst parameter required");
      for (double h : c.H) require(h > 0.0 && h <= 0.75, "H", "Hurst parameters must lie in (0, 3/4]");
      require(c.n.size() >= 5, "n", "grid needs at least 5 points");
      for (std::size_t v : c.n) require(v >= 8 && v <= 4096, "n", "grid points must lie in [8, 4096]");
      const double ratio = static_cast<double>(c.n[1]) / static_cast<double>(c.n[0]);
      for (std::size_t i = 1; i < c.n.size(); ++i) {
        const double r = static_cast<double>(c.n[i]) / static_cast<double>(c.n[i - 1]);
        require(ratio > 1.0 && std::abs(r - ratio) <= 1e-9 * ratio, "n", "grid must be geometric and increasing");
      }
      require(c.samples <= 10000000, "samples", "must not exceed 1e7");
      break;
    }
    case ExperimentKind::stein_bounds:
      break;
    case ExperimentKind::laguerre_suite:
      require(!c.nu.empty(), "nu", "at least one parameter required");
      for (double v : c.nu) require(v > -1.0 && v <= 10.0, "nu", "parameters must lie in (-1, 10]");
      require(c.d >= 1 && c.d <= 3, "d", "must lie in [1, 3]");
      require(c.degree >= 1 && c.degree <= 3, "degree", "must lie in [1, 3]");
      require(c.count >= 1 && c.count <= 10000, "count", "must lie in [1, 10000]");
      break;
    case ExperimentKind::duality_suite:
      require(c.d >= 1 && c.d <= 4, "d", "must lie in [1, 4]");
      require(c.degree >= 1 && c.degree <= 4, "degree", "must lie in [1, 4]");
      require(c.count >= 1 && c.count <= 10000, "count", "must lie in [1, 10000]");
      break;
  }
}

/// Strict parse: unknown, duplicate or inapplicable keys are ParseErrors with the
/// offending line; values outside their range are ConfigRangeErrors.
inline ExperimentConfig parse_config(std::string_view text) {
  struct Entry {
    std::string value;
    std::size_t line;
  };
  std::map<std::string, Entry> entries;
  std::size_t line_no = 0;
  std::size_t last_content_line = 1;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto nl = text.find('\n', pos);
    std::string_view raw = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    ++line_no;
    if (const auto hash = raw.find('#'); hash != std::string_view::npos) raw = raw.substr(0, hash);
    const auto line = detail::trim(raw);
    if (line.empty()) continue;
    last_content_line = line_no;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) throw ParseError(line_no, "expected 'key = value'");
    const std::string key(detail::trim(line.substr(0, eq)));
    const std::string value(detail::trim(line.substr(eq + 1)));
    if (key.empty()) throw ParseError(line_no, "missing key");
    if (!detail::known_keys().count(key)) throw ParseError(line_no, "unknown key '" + key + "'");
    if (value.empty()) throw ParseError(line_no, "empty value for '" + key + "'");
    if (entries.count(key))
      throw ParseError(line_no, "duplicate key '" + key + "' (first set on line " +
                                    std::to_string(entries.at(key).line) + ")");
    entries.emplace(key, Entry{value, line_no});
  }

  const auto exp = entries.find("experiment");
  if (exp == entries.end()) throw ParseError(last_content_line, "missing required key 'experiment'");
  const auto kind = experiment_from_string(exp->second.value);
  if (!kind) throw ParseError(exp->second.line, "unknown experiment '" + exp->second.value + "'");

  ExperimentConfig c = default_config(*kind);
  const auto& applicable = detail::applicable_keys(*kind);
  for (const auto& [key, e] : entries) {
    if (key == "experiment") continue;
    const bool common = key == "seed" || key == "output" || key == "format";
    if (!common && !applicable.count(key))
      throw ParseError(e.line, "key '" + key + "' does not apply to experiment '" + to_string(*kind) + "'");
    if (key == "seed") {
      c.seed = detail::parse_number<std::uint64_t>(e.value, e.line, key);
    } else if (key == "output") {
      c.output = e.value;
    } else if (key == "format") {
      if (e.value == "csv") {
        c.format = OutputFormat::csv;
      } else if (e.value == "json") {
        c.format = OutputFormat::json;
      } else {
        throw ConfigRangeError(key, "must be csv or json");
      }
    } else if (key == "k") {
      c.k = detail::parse_list<int>(e.value, e.line, key);
    } else if (key == "d") {
      c.d = detail::parse_number<std::size_t>(e.value, e.line, key);
    } else if (key == "count") {
      c.count = detail::parse_number<std::size_t>(e.value, e.line, key);
    } else if (key == "H") {
      c.H = detail::parse_list<double>(e.value, e.line, key);
    } else if (key == "n") {
      c.n = detail::parse_list<std::size_t>(e.value, e.line, key);
    } else if (key == "samples") {
      c.samples = detail::parse_number<std::size_t>(e.value, e.line, key);
    } else if (key == "nu") {
      c.nu = detail::parse_list<double>(e.value, e.line, key);
    } else if (key == "degree") {
      c.degree = detail::parse_number<int>(e.value, e.line, key);
    }
  }
  validate(c);
  return c;
}

}  // namespace chaos_forge::cli
