#pragma once

// Builds snapshot CSVs from each registry's public HTTP metadata.
//
//   crates  paginated listing that already carries created_at
//   pypi    name index (PEP 691 JSON), then per-project JSON; first_seen is
//           the earliest file upload time across all releases
//   npm     CouchDB _all_docs listing, then per-package document; first_seen
//           is time.created
//
// Endpoints are configuration. Per-package metadata requests run with bounded
// concurrency; the CSV is written by one thread to "<output>.tmp" and renamed
// over <output> only after the listing completes.

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <filesystem>
#include <fstream>
#include <functional>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "pkghallu/date.hpp"
#include "pkghallu/error.hpp"
#include "pkghallu/http.hpp"
#include "pkghallu/language.hpp"
#include "pkghallu/registry_catalog.hpp"

namespace pkghallu {

struct FetchConfig {
  // crates: listing base ("https://crates.io/api/v1"); pypi: simple index
  // ("https://pypi.org/simple"); npm: replication db ("https://replicate.npmjs.com").
  std::string list_url;
  // pypi: JSON API base ("https://pypi.org/pypi"); npm: registry
  // ("https://registry.npmjs.org"); unused for crates.
  std::string metadata_url;
  std::size_t page_size = 100;
  int concurrency = 8;
  RetryPolicy retry;
  std::string user_agent = "pkghallu-registry-fetch/0.1";
  std::optional<std::size_t> limit;  // stop after this many names
};

inline FetchConfig default_fetch_config(RegistryId registry) {
  FetchConfig c;
  switch (registry) {
    case RegistryId::crates:
      c.list_url = "https://crates.io/api/v1";
      break;
    case RegistryId::pypi:
      c.list_url = "https://pypi.org/simple";
      c.metadata_url = "https://pypi.org/pypi";
      break;
    case RegistryId::npm:
      c.list_url = "https://replicate.npmjs.com";
      c.metadata_url = "https://registry.npmjs.org";
      c.page_size = 10'000;
      break;
  }
  return c;
}

struct FetchProgress {
  std::size_t listed = 0;
  std::size_t resolved = 0;
  std::size_t skipped = 0;  // names without any visible release date
};

using ProgressSink = std::function<void(const FetchProgress&)>;

struct FetchResult {
  std::filesystem::path output;
  std::size_t rows = 0;
  std::size_t skipped = 0;
  Date snapshot_date;
};

namespace detail {

inline nlohmann::json parse_json_body(const HttpResponse& r, const std::string& what) {
  if (r.status != 200) throw NetworkError(what + ": HTTP " + std::to_string(r.status));
  try {
    return nlohmann::json::parse(r.body);
  } catch (const nlohmann::json::exception& e) {
    throw NetworkError(what + ": malformed JSON: " + e.what());
  }
}

inline HttpClient make_client(const std::string& base, const FetchConfig& cfg) {
  HttpClient c(Url::parse(base).origin, cfg.retry);
  c.set_default_headers({{"User-Agent", cfg.user_agent}});
  return c;
}

// Runs `resolve(name)` for every name on `concurrency` workers, each with its
// own HTTP client. First error stops the pool and is rethrown.
template <typename Resolve>
std::vector<std::optional<Date>> resolve_parallel(const std::vector<std::string>& names,
                                                  const FetchConfig& cfg, Resolve resolve,
                                                  FetchProgress& progress, const ProgressSink& sink) {
  std::vector<std::optional<Date>> out(names.size());
  std::atomic<std::size_t> next{0};
  std::atomic<bool> failed{false};
  std::mutex mu;
  std::exception_ptr error;
  auto worker = [&] {
    try {
      HttpClient client = make_client(cfg.metadata_url, cfg);
      for (;;) {
        if (failed) return;
        std::size_t i = next.fetch_add(1);
        if (i >= names.size()) return;
        out[i] = resolve(client, names[i]);
        std::lock_guard lock(mu);
        ++progress.resolved;
        if (!out[i]) ++progress.skipped;
        if (sink) sink(progress);
      }
    } catch (...) {
      std::lock_guard lock(mu);
      if (!error) error = std::current_exception();
      failed = true;
    }
  };
  {
    std::vector<std::jthread> pool;
    for (int k = 0; k < std::max(1, cfg.concurrency); ++k) pool.emplace_back(worker);
  }
  if (error) std::rethrow_exception(error);
  return out;
}

inline std::vector<std::pair<std::string, Date>> fetch_crates(const FetchConfig& cfg,
                                                              FetchProgress& progress,
                                                              const ProgressSink& sink) {
  Url base = Url::parse(cfg.list_url);
  HttpClient client = make_client(cfg.list_url, cfg);
  std::vector<std::pair<std::string, Date>> rows;
  std::string query = "?page=1&per_page=" + std::to_string(cfg.page_size) + "&sort=alphabetical";
  for (;;) {
    auto j = parse_json_body(client.get(base.path + "/crates" + query), "crates listing");
    for (const auto& c : j.at("crates")) {
      auto created = Date::try_parse_timestamp(c.at("created_at").get<std::string>());
      if (!created) throw NetworkError("crates listing: bad created_at for " + c.at("name").dump());
      rows.emplace_back(c.at("name").get<std::string>(), *created);
      ++progress.listed;
      ++progress.resolved;
      if (cfg.limit && rows.size() >= *cfg.limit) return rows;
    }
    if (sink) sink(progress);
    const auto& meta = j.at("meta");
    if (!meta.contains("next_page") || meta["next_page"].is_null()) break;
    query = meta["next_page"].get<std::string>();
    if (j.at("crates").empty()) break;
  }
  return rows;
}

inline std::optional<Date> earliest_pypi_upload(const nlohmann::json& doc) {
  std::optional<Date> best;
  if (!doc.contains("releases")) return best;
  for (const auto& [version, files] : doc["releases"].items()) {
    for (const auto& f : files) {
      for (const char* key : {"upload_time_iso_8601", "upload_time"}) {
        if (!f.contains(key) || !f[key].is_string()) continue;
        if (auto d = Date::try_parse_timestamp(f[key].get<std::string>())) {
          best = best ? std::min(*best, *d) : *d;
          break;
        }
      }
    }
  }
  return best;
}

inline std::vector<std::pair<std::string, Date>> fetch_pypi(const FetchConfig& cfg,
                                                            FetchProgress& progress,
                                                            const ProgressSink& sink) {
  Url list = Url::parse(cfg.list_url);
  HttpClient client = make_client(cfg.list_url, cfg);
  auto index = parse_json_body(
      client.get(list.path + "/", {{"Accept", "application/vnd.pypi.simple.v1+json"}}),
      "pypi simple index");
  std::vector<std::string> names;
  for (const auto& p : index.at("projects")) {
    names.push_back(p.at("name").get<std::string>());
    if (cfg.limit && names.size() >= *cfg.limit) break;
  }
  progress.listed = names.size();
  if (sink) sink(progress);

  Url meta = Url::parse(cfg.metadata_url);
  auto dates = resolve_parallel(
      names, cfg,
      [&](HttpClient& c, const std::string& name) -> std::optional<Date> {
        auto r = c.get(meta.path + "/" + url_encode_component(name) + "/json");
        if (r.status == 404) return std::nullopt;
        return earliest_pypi_upload(parse_json_body(r, "pypi metadata for " + name));
      },
      progress, sink);
  std::vector<std::pair<std::string, Date>> rows;
  for (std::size_t i = 0; i < names.size(); ++i)
    if (dates[i]) rows.emplace_back(names[i], *dates[i]);
  return rows;
}

inline std::vector<std::pair<std::string, Date>> fetch_npm(const FetchConfig& cfg,
                                                           FetchProgress& progress,
                                                           const ProgressSink& sink) {
  Url list = Url::parse(cfg.list_url);
  HttpClient client = make_client(cfg.list_url, cfg);
  std::vector<std::string> names;
  std::optional<std::string> startkey;
  for (;;) {
    std::string path = list.path + "/_all_docs?limit=" + std::to_string(cfg.page_size);
    if (startkey) path += "&skip=1&startkey=" + url_encode_component(nlohmann::json(*startkey).dump());
    auto j = parse_json_body(client.get(path), "npm listing");
    const auto& page = j.at("rows");
    for (const auto& row : page) {
      std::string id = row.at("id").get<std::string>();
      startkey = id;
      if (id.starts_with("_design/")) continue;
      names.push_back(std::move(id));
      if (cfg.limit && names.size() >= *cfg.limit) break;
    }
    progress.listed = names.size();
    if (sink) sink(progress);
    if (page.size() < cfg.page_size || (cfg.limit && names.size() >= *cfg.limit)) break;
  }

  Url meta = Url::parse(cfg.metadata_url);
  auto dates = resolve_parallel(
      names, cfg,
      [&](HttpClient& c, const std::string& name) -> std::optional<Date> {
        auto r = c.get(meta.path + "/" + url_encode_component(name),
                       {{"Accept", "application/json"}});
        if (r.status == 404) return std::nullopt;
        auto doc = parse_json_body(r, "npm metadata for " + name);
        if (!doc.contains("time") || !doc["time"].contains("created")) return std::nullopt;
        return Date::try_parse_timestamp(doc["time"]["created"].get<std::string>());
      },
      progress, sink);
  std::vector<std::pair<std::string, Date>> rows;
  for (std::size_t i = 0; i < names.size(); ++i)
    if (dates[i]) rows.emplace_back(names[i], *dates[i]);
  return rows;
}

}  // namespace detail

// Fetches a full registry listing into `output`. On failure no file is left
// behind at `output.tmp` and any previous `output` is untouched.
inline FetchResult fetch_registry(RegistryId registry, const std::filesystem::path& output,
                                  const FetchConfig& cfg, const ProgressSink& sink = {}) {
  auto tmp = std::filesystem::path(output.string() + ".tmp");
  FetchProgress progress;
  try {
    std::vector<std::pair<std::string, Date>> rows;
    switch (registry) {
      case RegistryId::crates: rows = detail::fetch_crates(cfg, progress, sink); break;
      case RegistryId::pypi: rows = detail::fetch_pypi(cfg, progress, sink); break;
      case RegistryId::npm: rows = detail::fetch_npm(cfg, progress, sink); break;
    }
    std::sort(rows.begin(), rows.end());
    Date snapshot = Date::today();
    for (const auto& r : rows) snapshot = std::max(snapshot, r.second);
    {
      std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
      if (!out) throw Error("cannot write " + tmp.string());
      out << "name,first_seen\n";
      for (const auto& [name, d] : rows) out << name << ',' << d.to_string() << '\n';
      out.flush();
      if (!out) throw Error("write failed for " + tmp.string());
    }
    std::filesystem::rename(tmp, output);
    write_snapshot_meta(output, {registry, snapshot, rows.size(), cfg.list_url});
    return {output, rows.size(), progress.skipped, snapshot};
  } catch (...) {
    std::error_code ec;
    std::filesystem::remove(tmp, ec);
    throw;
  }
}

}  // namespace pkghallu
