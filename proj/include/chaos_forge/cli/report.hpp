#pragma once

// Run reports: per-case records, assertions with margins, CSV and JSON
// rendering, and atomic file output.

#include <chaos_forge/cli/config.hpp>
#include <chaos_forge/errors.hpp>

#include <json.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#ifndef CHAOS_FORGE_VERSION
#define CHAOS_FORGE_VERSION "0.1.0"
#endif

namespace chaos_forge::cli {

using Cell = std::variant<std::string, long long, double, bool>;
using Row = std::vector<Cell>;

/// A named inequality `value <= threshold` (or `>=` when `at_least`); margin ≥ 0 iff it holds.
struct Assertion {
  std::string name;
  double value = 0.0;
  double threshold = 0.0;
  bool at_least = false;

  [[nodiscard]] double margin() const { return at_least ? value - threshold : threshold - value; }
  [[nodiscard]] bool pass() const { return margin() >= 0.0; }
};

struct RunReport {
  std::string experiment;
  std::vector<std::pair<std::string, std::string>> config;
  std::vector<std::string> columns;
  std::vector<Row> rows;
  std::vector<Assertion> assertions;
  double wall_clock_seconds = 0.0;
  std::string version = CHAOS_FORGE_VERSION;

  [[nodiscard]] bool all_pass() const {
    for (const auto& a : assertions)
      if (!a.pass()) return false;
    return true;
  }
};

/// 17 significant digits, so every double round-trips.
inline std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

/// Short form for labels, e.g. assertion names.
inline std::string format_label(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

inline std::string format_cell(const Cell& c) {
  struct Visitor {
    std::string operator()(const std::string& s) const {
      if (s.find_first_of(",\"\n") == std::string::npos) return s;
      std::string out = "\"";
      for (char ch : s) {
        if (ch == '"') out += '"';
        out += ch;
      }
      return out + "\"";
    }
    std::string operator()(long long v) const { return std::to_string(v); }
    std::string operator()(double v) const { return format_double(v); }
    std::string operator()(bool v) const { return v ? "true" : "false"; }
  };
  return std::visit(Visitor{}, c);
}

inline std::string join_list(const auto& values) {
  std::string out;
  for (const auto& v : values) {
    if (!out.empty()) out += ",";
    if constexpr (std::is_floating_point_v<std::decay_t<decltype(v)>>) {
      out += format_double(v);
    } else {
      out += std::to_string(v);
    }
  }
  return out;
}

/// Resolved configuration as ordered key/value text, listing only keys the experiment uses.
inline std::vector<std::pair<std::string, std::string>> config_echo(const ExperimentConfig& c) {
  std::vector<std::pair<std::string, std::string>> out{{"experiment", to_string(c.experiment)},
                                                       {"seed", std::to_string(c.seed)}};
  const auto& keys = detail::applicable_keys(c.experiment);
  auto add = [&](const std::string& key, std::string value) {
    if (keys.count(key)) out.emplace_back(key, std::move(value));
  };
  add("k", join_list(c.k));
  add("d", std::to_string(c.d));
  add("count", std::to_string(c.count));
  add("H", join_list(c.H));
  add("n", join_list(c.n));
  add("samples", std::to_string(c.samples));
  add("nu", join_list(c.nu));
  add("degree", std::to_string(c.degree));
  out.emplace_back("format", to_string(c.format));
  return out;
}

/// Records only: header row then one line per case. Deterministic for a fixed config and seed.
inline std::string render_csv(const RunReport& r) {
  std::string out;
  for (std::size_t i = 0; i < r.columns.size(); ++i) out += (i ? "," : "") + r.columns[i];
  out += "\n";
  for (const auto& row : r.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) out += (i ? "," : "") + format_cell(row[i]);
    out += "\n";
  }
  return out;
}

inline std::string render_assertions_csv(const RunReport& r) {
  std::string out = "assertion,value,relation,threshold,margin,pass\n";
  for (const auto& a : r.assertions)
    out += format_cell(a.name) + "," + format_double(a.value) + "," + (a.at_least ? ">=" : "<=") + "," +
           format_double(a.threshold) + "," + format_double(a.margin()) + "," + (a.pass() ? "true" : "false") + "\n";
  return out;
}

inline nlohmann::ordered_json cell_json(const Cell& c) {
  return std::visit([](const auto& v) { return nlohmann::ordered_json(v); }, c);
}

inline std::string render_json(const RunReport& r) {
  nlohmann::ordered_json j;
  j["version"] = r.version;
  j["experiment"] = r.experiment;
  auto& cfg = j["config"] = nlohmann::ordered_json::object();
  for (const auto& [k, v] : r.config) cfg[k] = v;
  auto& records = j["records"] = nlohmann::ordered_json::array();
  for (const auto& row : r.rows) {
    nlohmann::ordered_json rec = nlohmann::ordered_json::object();
    for (std::size_t i = 0; i < row.size(); ++i) rec[r.columns[i]] = cell_json(row[i]);
    records.push_back(std::move(rec));
  }
  auto& asserts = j["assertions"] = nlohmann::ordered_json::array();
  for (const auto& a : r.assertions)
    asserts.push_back({{"name", a.name},
                       {"value", a.value},
                       {"relation", a.at_least ? ">=" : "<="},
                       {"threshold", a.threshold},
                       {"margin", a.margin()},
                       {"pass", a.pass()}});
  j["pass"] = r.all_pass();
  j["wall_clock_seconds"] = r.wall_clock_seconds;
  return j.dump(2) + "\n";
}

/// Writes through a sibling temporary file and renames it over `path`.
inline void write_atomically(const std::filesystem::path& path, const std::string& body) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open '" + tmp.string() + "' for writing");
    out << body;
    out.flush();
    if (!out) throw std::runtime_error("write to '" + tmp.string() + "' failed");
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp);
    throw std::runtime_error("cannot rename onto '" + path.string() + "': " + ec.message());
  }
}

/// Path of the assertion table written next to a CSV report.
inline std::filesystem::path assertions_path(const std::filesystem::path& report) {
  auto p = report;
  p += ".assertions.csv";
  return p;
}

}  // namespace chaos_forge::cli
