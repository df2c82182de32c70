#pragma once

// Scans source files for imports that a registry snapshot does not know, or
// only knows from after a given cutoff.

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include <json.hpp>

#include "pkghallu/date.hpp"
#include "pkghallu/error.hpp"
#include "pkghallu/import_extract.hpp"
#include "pkghallu/language.hpp"
#include "pkghallu/registry_catalog.hpp"

namespace pkghallu {

enum class Severity { ok, post_cutoff, hallucinated };

inline constexpr std::string_view to_string(Severity s) {
  switch (s) {
    case Severity::ok: return "ok";
    case Severity::post_cutoff: return "post_cutoff";
    case Severity::hallucinated: return "hallucinated";
  }
  return "?";
}

inline constexpr Severity severity_of(LookupStatus s) {
  switch (s) {
    case LookupStatus::not_registered: return Severity::hallucinated;
    case LookupStatus::registered_after_cutoff: return Severity::post_cutoff;
    case LookupStatus::registered_before_cutoff: return Severity::ok;
  }
  return Severity::hallucinated;
}

struct Finding {
  std::string path;
  std::size_t line = 0;
  PackageRef ref;
  LookupVerdict verdict;
  Date cutoff;
  Severity severity = Severity::ok;
};

struct ScanOptions {
  std::optional<SourceLanguage> language;  // forced for every file
  std::optional<Date> cutoff;              // default: each catalog's snapshot date
  ExtractionConfig extraction = ExtractionConfig::with_default_builtins();
};

struct ScanResult {
  std::vector<Finding> findings;  // ordered by (path, line)
  std::vector<std::string> warnings;
  std::vector<std::string> errors;  // per-file failures; the scan continues past them
  std::size_t files_scanned = 0;

  int exit_status() const { return scan_exit_status(findings); }

  static int scan_exit_status(const std::vector<Finding>& findings) {
    return std::any_of(findings.begin(), findings.end(),
                       [](const Finding& f) { return f.severity != Severity::ok; })
               ? 1
               : 0;
  }
};

inline std::optional<SourceLanguage> language_from_extension(const std::filesystem::path& p) {
  auto ext = text::to_lower_ascii(p.extension().string());
  if (ext == ".py") return SourceLanguage::python;
  if (ext == ".js" || ext == ".mjs" || ext == ".cjs") return SourceLanguage::javascript;
  if (ext == ".rs") return SourceLanguage::rust;
  return std::nullopt;
}

namespace detail {

inline bool skipped_directory(const std::filesystem::path& p) {
  auto name = p.filename().string();
  return name == "node_modules" || name == "target" || name == "__pycache__" ||
         (name.size() > 1 && name.front() == '.');
}

// Expands directories recursively; with no forced language only files with a
// known extension are picked up from directories.
inline void expand_paths(const std::vector<std::filesystem::path>& inputs, bool forced,
                         std::vector<std::filesystem::path>& files, ScanResult& result) {
  namespace fs = std::filesystem;
  for (const auto& in : inputs) {
    std::error_code ec;
    if (!fs::is_directory(in, ec)) {
      files.push_back(in);
      continue;
    }
    fs::recursive_directory_iterator it(in, fs::directory_options::skip_permission_denied, ec), end;
    if (ec) {
      result.errors.push_back(in.string() + ": " + ec.message());
      continue;
    }
    for (; it != end; it.increment(ec)) {
      if (ec) {
        result.errors.push_back(in.string() + ": " + ec.message());
        break;
      }
      if (it->is_directory(ec)) {
        if (skipped_directory(it->path())) it.disable_recursion_pending();
        continue;
      }
      if (it->is_regular_file(ec) && (forced || language_from_extension(it->path())))
        files.push_back(it->path());
    }
  }
}

inline std::optional<std::string> read_file(const std::filesystem::path& p, std::string& error) {
  std::ifstream in(p, std::ios::binary);
  if (!in) {
    error = "cannot read file";
    return std::nullopt;
  }
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) {
    error = "read error";
    return std::nullopt;
  }
  return ss.str();
}

}  // namespace detail

inline ScanResult scan_paths(const std::vector<std::filesystem::path>& paths,
                             const std::map<RegistryId, PackageCatalog>& catalogs, const ScanOptions& options = {}) {
  ScanResult result;
  std::vector<std::filesystem::path> files;
  detail::expand_paths(paths, options.language.has_value(), files, result);
  std::sort(files.begin(), files.end());
  files.erase(std::unique(files.begin(), files.end()), files.end());

  for (const auto& file : files) {
    auto lang = options.language ? options.language : language_from_extension(file);
    if (!lang) {
      result.warnings.push_back(file.string() + ": unknown file type, skipped (use --language)");
      continue;
    }
    auto catalog = catalogs.find(registry_for(*lang));
    if (catalog == catalogs.end()) {
      result.warnings.push_back(file.string() + ": no " + std::string(to_string(registry_for(*lang))) +
                                " catalog, skipped");
      continue;
    }
    std::string error;
    auto content = detail::read_file(file, error);
    if (!content) {
      result.errors.push_back(file.string() + ": " + error);
      continue;
    }
    Date cutoff = options.cutoff.value_or(catalog->second.snapshot_date());
    std::vector<PackageRef> refs;
    try {
      refs = extract_imports(*content, *lang, options.extraction);
    } catch (const InputError& e) {
      result.errors.push_back(file.string() + ": " + e.what());
      continue;
    }
    ++result.files_scanned;
    for (auto& ref : refs) {
      auto verdict = lookup(catalog->second, ref.normalized, cutoff);
      std::size_t line = ref.line;
      result.findings.push_back({file.string(), line, std::move(ref), verdict, cutoff, severity_of(verdict.status)});
    }
  }
  std::stable_sort(result.findings.begin(), result.findings.end(), [](const Finding& a, const Finding& b) {
    return std::tie(a.path, a.line) < std::tie(b.path, b.line);
  });
  return result;
}

inline nlohmann::json findings_to_json(const ScanResult& r) {
  nlohmann::json list = nlohmann::json::array();
  for (const auto& f : r.findings)
    list.push_back({{"path", f.path},
                    {"line", f.line},
                    {"language", to_string(f.ref.language)},
                    {"package", f.ref.raw},
                    {"normalized", f.ref.normalized},
                    {"kind", to_string(f.ref.kind)},
                    {"status", to_string(f.verdict.status)},
                    {"first_seen", f.verdict.first_seen ? nlohmann::json(f.verdict.first_seen->to_string())
                                                        : nlohmann::json(nullptr)},
                    {"cutoff", f.cutoff.to_string()},
                    {"severity", to_string(f.severity)}});
  return {{"files_scanned", r.files_scanned}, {"findings", std::move(list)}};
}

// One line per finding that is not ok.
inline std::string findings_to_text(const ScanResult& r) {
  std::ostringstream os;
  for (const auto& f : r.findings) {
    if (f.severity == Severity::ok) continue;
    os << f.path << ':' << f.line << ": " << to_string(f.severity) << ": '" << f.ref.raw << "'";
    if (f.severity == Severity::hallucinated)
      os << " is not in the " << to_string(registry_for(f.ref.language)) << " registry";
    else
      os << " was first published " << f.verdict.first_seen->to_string() << ", after " << f.cutoff.to_string();
    os << '\n';
  }
  return os.str();
}

}  // namespace pkghallu
