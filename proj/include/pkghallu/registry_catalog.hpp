#pragma once

// Date-indexed catalogs of registered package names.
//
// Snapshot CSV: UTF-8, header "name,first_seen", one row per package,
// first_seen as YYYY-MM-DD (UTC). Names are stored as registered and
// normalized on load. Snapshot metadata (registry, capture date) lives in a
// sidecar "<file>.meta.json".

#include <algorithm>
#include <cstddef>
#include <filesystem>
#include <fstream>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include <json.hpp>

#include "pkghallu/date.hpp"
#include "pkghallu/error.hpp"
#include "pkghallu/import_extract.hpp"
#include "pkghallu/language.hpp"
#include "pkghallu/text.hpp"

namespace pkghallu {

inline std::string normalize_for_registry(std::string_view raw, RegistryId registry) {
  return normalize_name(raw, language_for(registry));
}

enum class LookupStatus { not_registered, registered_before_cutoff, registered_after_cutoff };

inline constexpr std::string_view to_string(LookupStatus s) {
  switch (s) {
    case LookupStatus::not_registered: return "not_registered";
    case LookupStatus::registered_before_cutoff: return "registered_before_cutoff";
    case LookupStatus::registered_after_cutoff: return "registered_after_cutoff";
  }
  return "?";
}

inline LookupStatus parse_lookup_status(std::string_view s) {
  for (auto v : {LookupStatus::not_registered, LookupStatus::registered_before_cutoff,
                 LookupStatus::registered_after_cutoff})
    if (to_string(v) == s) return v;
  throw InputError("unknown lookup status '" + std::string(s) + "'");
}

struct LookupVerdict {
  LookupStatus status = LookupStatus::not_registered;
  std::optional<Date> first_seen;  // present iff status != not_registered

  bool hallucinated() const { return status != LookupStatus::registered_before_cutoff; }

  friend bool operator==(const LookupVerdict&, const LookupVerdict&) = default;
};

struct CatalogStats {
  std::size_t count = 0;
  Date earliest;
  Date latest;
};

namespace detail {
struct StringHash {
  using is_transparent = void;
  std::size_t operator()(std::string_view s) const { return std::hash<std::string_view>{}(s); }
};
}  // namespace detail

class PackageCatalog {
 public:
  using Entries = std::unordered_map<std::string, Date, detail::StringHash, std::equal_to<>>;

  // Keys must already be normalized; every first_seen must be on or before
  // the snapshot date.
  PackageCatalog(RegistryId registry, Date snapshot_date, Entries entries)
      : registry_(registry), snapshot_date_(snapshot_date), entries_(std::move(entries)) {
    for (const auto& [name, first_seen] : entries_) {
      if (normalize_for_registry(name, registry_) != name)
        throw InputError("catalog key '" + name + "' is not normalized");
      if (first_seen > snapshot_date_)
        throw InputError("package '" + name + "' first seen " + first_seen.to_string() +
                         " after snapshot date " + snapshot_date_.to_string());
    }
  }

  RegistryId registry() const { return registry_; }
  Date snapshot_date() const { return snapshot_date_; }
  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }
  const Entries& entries() const { return entries_; }

  std::optional<Date> first_seen(std::string_view normalized) const {
    auto it = entries_.find(normalized);
    if (it == entries_.end()) return std::nullopt;
    return it->second;
  }

 private:
  RegistryId registry_;
  Date snapshot_date_;
  Entries entries_;
};

// A package registered on the cutoff date itself counts as known.
inline LookupVerdict lookup(const PackageCatalog& catalog, std::string_view normalized, Date cutoff) {
  if (cutoff > catalog.snapshot_date())
    throw InputError("cutoff " + cutoff.to_string() + " is after the catalog snapshot date " +
                     catalog.snapshot_date().to_string());
  auto seen = catalog.first_seen(normalized);
  if (!seen) return {LookupStatus::not_registered, std::nullopt};
  if (*seen > cutoff) return {LookupStatus::registered_after_cutoff, seen};
  return {LookupStatus::registered_before_cutoff, seen};
}

inline CatalogStats catalog_stats(const PackageCatalog& catalog) {
  if (catalog.empty()) throw InputError("catalog_stats requires a non-empty catalog");
  CatalogStats s;
  s.count = catalog.size();
  s.earliest = s.latest = catalog.entries().begin()->second;
  for (const auto& [name, d] : catalog.entries()) {
    s.earliest = std::min(s.earliest, d);
    s.latest = std::max(s.latest, d);
  }
  return s;
}

struct SnapshotMeta {
  RegistryId registry;
  Date snapshot_date;
  std::size_t rows = 0;
  std::string source;
};

inline std::filesystem::path snapshot_meta_path(const std::filesystem::path& csv) {
  return csv.string() + ".meta.json";
}

inline std::optional<SnapshotMeta> read_snapshot_meta(const std::filesystem::path& csv) {
  auto path = snapshot_meta_path(csv);
  if (!std::filesystem::exists(path)) return std::nullopt;
  std::ifstream in(path);
  try {
    auto j = nlohmann::json::parse(in);
    SnapshotMeta m{parse_registry(j.at("registry").get<std::string>()),
                   Date::parse(j.at("snapshot_date").get<std::string>()),
                   j.value("rows", std::size_t{0}), j.value("source", std::string{})};
    return m;
  } catch (const nlohmann::json::exception& e) {
    throw LoadError(path.string(), 0, e.what());
  } catch (const InputError& e) {
    throw LoadError(path.string(), 0, e.what());
  }
}

inline void write_snapshot_meta(const std::filesystem::path& csv, const SnapshotMeta& meta) {
  nlohmann::json j{{"registry", to_string(meta.registry)},
                   {"snapshot_date", meta.snapshot_date.to_string()},
                   {"rows", meta.rows},
                   {"source", meta.source}};
  std::ofstream out(snapshot_meta_path(csv));
  out << j.dump(2) << '\n';
}

struct SnapshotRow {
  std::string name;
  Date first_seen;
};

// Streaming reader for the snapshot CSV; calls `sink` once per data row.
inline void read_snapshot_rows(const std::filesystem::path& path,
                               const std::function<void(SnapshotRow&&, std::size_t)>& sink) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw LoadError(path.string(), 0, "cannot open snapshot");
  std::string line;
  std::size_t line_no = 0;
  bool header_seen = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!header_seen) {
      if (line.starts_with("\xEF\xBB\xBF")) line.erase(0, 3);
      if (line != "name,first_seen")
        throw LoadError(path.string(), line_no, "expected header 'name,first_seen'");
      header_seen = true;
      continue;
    }
    if (line.empty()) continue;
    std::string_view row = line;
    std::size_t comma = row.find(',');
    if (comma == std::string_view::npos || row.find(',', comma + 1) != std::string_view::npos)
      throw LoadError(path.string(), line_no, "expected 2 columns");
    std::string_view name = text::trim(row.substr(0, comma));
    if (name.size() >= 2 && name.front() == '"' && name.back() == '"')
      name = name.substr(1, name.size() - 2);
    auto date = Date::try_parse(text::trim(row.substr(comma + 1)));
    if (name.empty()) throw LoadError(path.string(), line_no, "empty package name");
    if (!date) throw LoadError(path.string(), line_no, "unparseable date");
    if (text::find_invalid_utf8(name) != std::string_view::npos)
      throw LoadError(path.string(), line_no, "package name is not valid UTF-8");
    sink({std::string(name), *date}, line_no);
  }
  if (!header_seen) throw LoadError(path.string(), 0, "empty snapshot file");
}

// Loads a snapshot. The registry and snapshot date come from the sidecar
// when present; explicit arguments must agree with it. Without either, the
// snapshot date defaults to the latest first_seen in the file.
inline PackageCatalog load_snapshot(const std::filesystem::path& path,
                                    std::optional<RegistryId> registry = std::nullopt,
                                    std::optional<Date> snapshot_date = std::nullopt) {
  auto meta = read_snapshot_meta(path);
  if (meta && registry && meta->registry != *registry)
    throw LoadError(path.string(), 0,
                    "snapshot is for " + std::string(to_string(meta->registry)) + ", not " +
                        std::string(to_string(*registry)));
  if (!registry && meta) registry = meta->registry;
  if (!registry) throw LoadError(path.string(), 0, "registry unknown (no sidecar metadata)");
  if (!snapshot_date && meta) snapshot_date = meta->snapshot_date;

  PackageCatalog::Entries entries;
  std::optional<Date> latest;
  read_snapshot_rows(path, [&](SnapshotRow&& row, std::size_t line_no) {
    std::string key;
    try {
      key = normalize_for_registry(row.name, *registry);
    } catch (const InputError& e) {
      throw LoadError(path.string(), line_no, e.what());
    }
    if (snapshot_date && row.first_seen > *snapshot_date)
      throw LoadError(path.string(), line_no, "first_seen after snapshot date");
    auto [it, inserted] = entries.try_emplace(std::move(key), row.first_seen);
    if (!inserted) it->second = std::min(it->second, row.first_seen);
    latest = latest ? std::max(*latest, row.first_seen) : row.first_seen;
  });
  if (entries.empty()) throw LoadError(path.string(), 0, "snapshot has no entries");
  return PackageCatalog(*registry, snapshot_date.value_or(*latest), std::move(entries));
}

// Writes rows sorted by name, then the sidecar. The CSV is written to a
// temporary sibling and renamed into place.
inline void save_snapshot(const PackageCatalog& catalog, const std::filesystem::path& path,
                          const std::string& source = {}) {
  std::vector<std::pair<std::string_view, Date>> rows(catalog.entries().begin(),
                                                      catalog.entries().end());
  std::sort(rows.begin(), rows.end());
  auto tmp = std::filesystem::path(path.string() + ".tmp");
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write " + tmp.string());
    out << "name,first_seen\n";
    for (const auto& [name, d] : rows) out << name << ',' << d.to_string() << '\n';
    if (!out) throw Error("write failed for " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
  write_snapshot_meta(path, {catalog.registry(), catalog.snapshot_date(), rows.size(), source});
}

}  // namespace pkghallu
