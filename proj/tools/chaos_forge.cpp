#include <chaos_forge/cli/config.hpp>
#include <chaos_forge/cli/experiments.hpp>
#include <chaos_forge/cli/report.hpp>

#include <CLI11.hpp>

#include <charconv>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <thread>

namespace cli = chaos_forge::cli;

namespace {

constexpr int kExitPass = 0;
constexpr int kExitFailure = 1;
constexpr int kExitUsage = 2;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw UsageError("cannot read config '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

unsigned resolve_jobs(int flag) {
  if (flag > 0) return static_cast<unsigned>(flag);
  if (const char* env = std::getenv("CHAOS_FORGE_JOBS"); env != nullptr && *env != '\0') {
    unsigned v = 0;
    const std::string s(env);
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size() || v == 0 || v > 256)
      throw UsageError("CHAOS_FORGE_JOBS must be an integer in [1, 256]");
    return v;
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

void print_assertions(const cli::RunReport& r, std::ostream& os) {
  for (const auto& a : r.assertions)
    os << (a.pass() ? "PASS " : "FAIL ") << a.name << " value=" << cli::format_double(a.value)
       << (a.at_least ? " >= " : " <= ") << cli::format_double(a.threshold)
       << " margin=" << cli::format_double(a.margin()) << "\n";
  os << (r.all_pass() ? "all assertions passed" : "assertion failure") << " (" << r.rows.size() << " records, "
     << cli::format_double(r.wall_clock_seconds) << " s)\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"chaos_forge: Wiener chaos, Stein bounds and fourth-moment experiments"};
  app.require_subcommand(1);
  app.set_version_flag("--version", CHAOS_FORGE_VERSION);

  auto* run = app.add_subcommand("run", "Run an experiment described by a config file");
  std::string config_path, out_path, format;
  std::uint64_t seed = 0;
  int jobs = 0;
  run->add_option("--config", config_path, "Config file (key = value per line)")->required();
  run->add_option("--out", out_path, "Report path (overrides 'output'); stdout when absent");
  run->add_option("--format", format, "csv or json (overrides 'format')")->check(CLI::IsMember({"csv", "json"}));
  auto* seed_opt = run->add_option("--seed", seed, "Root seed (overrides 'seed')");
  run->add_option("--jobs", jobs, "Worker threads; falls back to CHAOS_FORGE_JOBS")->check(CLI::Range(1, 256));

  auto* list = app.add_subcommand("list", "List experiment kinds");

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  if (list->parsed()) {
    for (const auto& [kind, name] : cli::experiment_kinds()) std::cout << name << "\n";
    return kExitPass;
  }

  cli::ExperimentConfig config;
  unsigned workers = 1;
  try {
    config = cli::parse_config(read_file(config_path));
    if (*seed_opt) config.seed = seed;
    if (!out_path.empty()) config.output = out_path;
    if (!format.empty()) config.format = format == "json" ? cli::OutputFormat::json : cli::OutputFormat::csv;
    workers = resolve_jobs(jobs);
  } catch (const chaos_forge::ParseError& e) {
    std::cerr << "config error: " << config_path << ": " << e.what() << "\n";
    return kExitUsage;
  } catch (const chaos_forge::ConfigRangeError& e) {
    std::cerr << "config range error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kExitUsage;
  }

  try {
    const auto report = cli::run_experiment(config, workers);
    const std::string body =
        config.format == cli::OutputFormat::json ? cli::render_json(report) : cli::render_csv(report);
    if (config.output) {
      cli::write_atomically(*config.output, body);
      if (config.format == cli::OutputFormat::csv)
        cli::write_atomically(cli::assertions_path(*config.output), cli::render_assertions_csv(report));
    } else {
      std::cout << body;
    }
    print_assertions(report, std::cerr);
    return report.all_pass() ? kExitPass : kExitFailure;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitFailure;
  }
}
