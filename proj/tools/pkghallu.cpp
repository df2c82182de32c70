// pkghallu: registry snapshots, probe runs, analysis and the import guard.
//
// Exit status: 0 success, 1 failure (findings, failed checks, runtime
// errors), 2 usage errors.

#include <atomic>
#include <chrono>
#include <csignal>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <stop_token>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "pkghallu/pkghallu.hpp"

namespace fs = std::filesystem;
using namespace pkghallu;

namespace {

constexpr int kExitFailure = 1;
constexpr int kExitUsage = 2;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::atomic<bool> g_interrupted{false};

extern "C" void on_sigint(int) { g_interrupted = true; }

// Forwards SIGINT/SIGTERM to a stop_source so workers can finish cleanly.
class InterruptBridge {
 public:
  InterruptBridge() {
    std::signal(SIGINT, on_sigint);
    std::signal(SIGTERM, on_sigint);
    watcher_ = std::jthread([this](std::stop_token self) {
      while (!self.stop_requested()) {
        if (g_interrupted) {
          source_.request_stop();
          return;
        }
        std::this_thread::sleep_for(std::chrono::milliseconds(50));
      }
    });
  }
  ~InterruptBridge() {
    std::signal(SIGINT, SIG_DFL);
    std::signal(SIGTERM, SIG_DFL);
  }
  std::stop_token token() const { return source_.get_token(); }

 private:
  std::stop_source source_;
  std::jthread watcher_;
};

void write_output(const std::string& content, const std::string& path) {
  if (path.empty() || path == "-") {
    std::cout << content;
    return;
  }
  write_text_atomic(path, content);
}

// ---- catalog ----------------------------------------------------------------

struct FetchArgs {
  std::string registry;
  std::string output;
  std::string list_url, metadata_url;
  std::size_t page_size = 0;
  int concurrency = 8;
  int retries = 3;
  std::optional<std::size_t> limit;
};

int cmd_catalog_fetch(const FetchArgs& a) {
  auto registry = parse_registry(a.registry);
  auto cfg = default_fetch_config(registry);
  if (!a.list_url.empty()) cfg.list_url = a.list_url;
  if (!a.metadata_url.empty()) cfg.metadata_url = a.metadata_url;
  if (a.page_size) cfg.page_size = a.page_size;
  cfg.concurrency = a.concurrency;
  cfg.retry.max_retries = a.retries;
  cfg.limit = a.limit;
  auto last = std::chrono::steady_clock::now();
  auto result = fetch_registry(registry, a.output, cfg, [&](const FetchProgress& p) {
    auto now = std::chrono::steady_clock::now();
    if (now - last < std::chrono::seconds(2)) return;
    last = now;
    std::cerr << "listed " << p.listed << ", resolved " << p.resolved << ", skipped " << p.skipped << '\n';
  });
  std::cerr << "wrote " << result.rows << " packages to " << result.output.string() << " (snapshot "
            << result.snapshot_date.to_string() << ", " << result.skipped << " without a release date)\n";
  return 0;
}

int cmd_catalog_stats(const std::string& file, const std::string& registry, bool json) {
  std::optional<RegistryId> reg;
  if (!registry.empty()) reg = parse_registry(registry);
  auto catalog = load_snapshot(file, reg);
  auto s = catalog_stats(catalog);
  if (json) {
    std::cout << nlohmann::json{{"registry", to_string(catalog.registry())},
                                {"snapshot_date", catalog.snapshot_date().to_string()},
                                {"packages", s.count},
                                {"earliest", s.earliest.to_string()},
                                {"latest", s.latest.to_string()}}
                     .dump(2)
              << '\n';
  } else {
    std::cout << "registry:      " << to_string(catalog.registry()) << '\n'
              << "snapshot date: " << catalog.snapshot_date().to_string() << '\n'
              << "packages:      " << s.count << '\n'
              << "earliest:      " << s.earliest.to_string() << '\n'
              << "latest:        " << s.latest.to_string() << '\n';
  }
  return 0;
}

// ---- probe / analyze ----------------------------------------------------------

int cmd_probe_run(const std::string& config_path) {
  auto cfg = load_run_config(config_path);
  InterruptBridge bridge;
  std::size_t done = 0;
  auto summary = run_configured_probe(cfg, bridge.token(), [&](const Generation& g) {
    if (++done % 50 == 0) std::cerr << done << " generations stored (last: " << g.model << ")\n";
  });
  std::cerr << "pairs " << summary.total_pairs << ", already stored " << summary.already_done << ", requested "
            << summary.requested << ", errors " << summary.errors << '\n';
  if (summary.interrupted) {
    std::cerr << "interrupted; rerun the same command to resume\n";
    return kExitFailure;
  }
  std::cout << cfg.store_path().string() << '\n';
  return 0;
}

int cmd_analyze_fixture(const std::string& format, const std::string& out_dir) {
  const auto& tables = published_tables();
  auto report = reproduce_published(tables);
  if (!out_dir.empty()) {
    auto cells = tables.cells();
    auto profiles = tables.profiles();
    write_text_atomic(fs::path(out_dir) / "reproduction.json", report.to_json().dump(2) + "\n");
    write_plot_data(fs::path(out_dir) / "plots", cells, profiles);
  }
  if (format == "json")
    std::cout << report.to_json().dump(2) << '\n';
  else
    std::cout << report.to_text() << (report.passed() ? "reproduction: PASS\n" : "reproduction: FAIL\n");
  return report.passed() ? 0 : kExitFailure;
}

int cmd_analyze_run(const std::string& config_path) {
  auto cfg = load_run_config(config_path);
  auto a = analyze_run(cfg);
  std::cout << render_report(VerdictSet{a.verdicts, cfg.trial_unit}, ReportFormat::md);
  std::cerr << "wrote " << cfg.verdicts_path().string() << ", report.json, report.md and plots/ under "
            << cfg.output_dir.string() << '\n';
  return 0;
}

// ---- scan ---------------------------------------------------------------------

struct ScanArgs {
  std::vector<std::string> paths;
  std::vector<std::string> catalogs;
  std::string cutoff;
  std::string language;
  std::string format = "text";
  std::string builtins;
};

int cmd_scan(const ScanArgs& a) {
  std::map<RegistryId, PackageCatalog> catalogs;
  for (const auto& spec : a.catalogs) {
    std::optional<RegistryId> reg;
    std::string path = spec;
    if (auto eq = spec.find('='); eq != std::string::npos) {
      auto maybe = spec.substr(0, eq);
      if (maybe == "npm" || maybe == "pypi" || maybe == "crates") {
        reg = parse_registry(maybe);
        path = spec.substr(eq + 1);
      }
    }
    auto catalog = load_snapshot(path, reg);
    auto id = catalog.registry();
    if (!catalogs.emplace(id, std::move(catalog)).second)
      throw UsageError("more than one " + std::string(to_string(id)) + " catalog given");
  }
  ScanOptions opt;
  if (!a.cutoff.empty()) {
    auto d = Date::try_parse(a.cutoff);
    if (!d) throw UsageError("--cutoff expects YYYY-MM-DD, got '" + a.cutoff + "'");
    opt.cutoff = d;
  }
  if (!a.language.empty()) opt.language = parse_language(a.language);
  if (!a.builtins.empty()) opt.extraction = ExtractionConfig::from_directory(a.builtins);
  std::vector<fs::path> paths(a.paths.begin(), a.paths.end());

  auto result = scan_paths(paths, catalogs, opt);
  for (const auto& w : result.warnings) std::cerr << "warning: " << w << '\n';
  for (const auto& e : result.errors) std::cerr << "error: " << e << '\n';
  if (a.format == "json")
    std::cout << findings_to_json(result).dump(2) << '\n';
  else
    std::cout << findings_to_text(result);
  return result.exit_status();
}

// ---- report -------------------------------------------------------------------

int cmd_report(const std::string& input, const std::string& format, const std::string& output,
               const std::string& unit) {
  auto set = load_verdicts(input);
  if (!unit.empty()) set.unit = parse_trial_unit(unit);
  write_output(render_report(set, parse_report_format(format)), output);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Package hallucination measurement and import guard"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "pkghallu 0.1.0");

  auto* catalog = app.add_subcommand("catalog", "Registry snapshots");
  catalog->require_subcommand(1);
  FetchArgs fetch;
  auto* fetch_cmd = catalog->add_subcommand("fetch", "Download a registry snapshot (name, first-seen date)");
  fetch_cmd->add_option("registry", fetch.registry, "npm, pypi or crates")
      ->required()
      ->check(CLI::IsMember({"npm", "pypi", "crates"}));
  fetch_cmd->add_option("-o,--output", fetch.output, "Snapshot CSV to write")->required();
  fetch_cmd->add_option("--list-url", fetch.list_url, "Override the listing endpoint");
  fetch_cmd->add_option("--metadata-url", fetch.metadata_url, "Override the per-package metadata endpoint");
  fetch_cmd->add_option("--page-size", fetch.page_size, "Listing page size");
  fetch_cmd->add_option("--concurrency", fetch.concurrency, "Parallel metadata requests")
      ->check(CLI::PositiveNumber);
  fetch_cmd->add_option("--retries", fetch.retries, "Retries per request")->check(CLI::NonNegativeNumber);
  fetch_cmd->add_option("--limit", fetch.limit, "Stop after this many packages");

  std::string stats_file, stats_registry;
  bool stats_json = false;
  auto* stats_cmd = catalog->add_subcommand("stats", "Summarize a snapshot");
  stats_cmd->add_option("file", stats_file, "Snapshot CSV")->required();
  stats_cmd->add_option("--registry", stats_registry, "Registry when the snapshot has no sidecar")
      ->check(CLI::IsMember({"npm", "pypi", "crates"}));
  stats_cmd->add_flag("--json", stats_json, "JSON output");

  auto* probe = app.add_subcommand("probe", "Query models");
  probe->require_subcommand(1);
  std::string probe_config;
  auto* probe_run = probe->add_subcommand("run", "Run (or resume) the prompt matrix against every model");
  probe_run->add_option("-c,--config", probe_config, "Run configuration JSON")->required();

  std::string analyze_config, analyze_fixtures, analyze_format = "text", analyze_out;
  auto* analyze = app.add_subcommand("analyze", "Judge a run, or reproduce the published tables");
  auto* opt_config = analyze->add_option("-c,--config", analyze_config, "Run configuration JSON");
  auto* opt_fixtures = analyze->add_option("--fixtures", analyze_fixtures, "Bundled fixture set")
                           ->check(CLI::IsMember({"paper"}));
  opt_config->excludes(opt_fixtures);
  analyze->add_option("--format", analyze_format, "text or json (fixtures only)")
      ->check(CLI::IsMember({"text", "json"}));
  analyze->add_option("-o,--output-dir", analyze_out, "Write reproduction.json and plots/ here (fixtures only)");

  ScanArgs scan;
  auto* scan_cmd = app.add_subcommand("scan", "Flag imports that are unregistered or newer than a cutoff");
  scan_cmd->add_option("paths", scan.paths, "Files or directories")->required();
  scan_cmd->add_option("--catalog", scan.catalogs, "[registry=]snapshot.csv (repeatable)")->required();
  scan_cmd->add_option("--cutoff", scan.cutoff, "YYYY-MM-DD; default is the snapshot date");
  scan_cmd->add_option("--language", scan.language, "Force the language of every file")
      ->check(CLI::IsMember({"python", "javascript", "rust"}));
  scan_cmd->add_option("--format", scan.format, "text or json")->check(CLI::IsMember({"text", "json"}));
  scan_cmd->add_option("--builtins", scan.builtins, "Directory with python.txt/javascript.txt/rust.txt");

  std::string report_input, report_format, report_output, report_unit;
  auto* report = app.add_subcommand("report", "Render a verdict file");
  report->add_option("-i,--input", report_input, "verdicts.json")->required();
  report->add_option("-f,--format", report_format, "json, csv or md")
      ->required()
      ->check(CLI::IsMember({"json", "csv", "md"}));
  report->add_option("-o,--output", report_output, "Output file (default stdout)");
  report->add_option("--trial-unit", report_unit, "generation or prompt")
      ->check(CLI::IsMember({"generation", "prompt"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : kExitUsage;
  }

  try {
    if (*fetch_cmd) return cmd_catalog_fetch(fetch);
    if (*stats_cmd) return cmd_catalog_stats(stats_file, stats_registry, stats_json);
    if (*probe_run) return cmd_probe_run(probe_config);
    if (*analyze) {
      if (!analyze_fixtures.empty()) return cmd_analyze_fixture(analyze_format, analyze_out);
      if (analyze_config.empty()) throw UsageError("analyze needs -c RUNCONFIG or --fixtures paper");
      return cmd_analyze_run(analyze_config);
    }
    if (*scan_cmd) return cmd_scan(scan);
    if (*report) return cmd_report(report_input, report_format, report_output, report_unit);
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const LoadError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitFailure;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitFailure;
  }
  return kExitUsage;
}
