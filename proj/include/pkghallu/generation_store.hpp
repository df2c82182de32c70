#pragma once

// Append-only JSON-lines store of model generations.
//
// One record per line. A record is keyed by (model, language, stub, task,
// repetition); the first record for a key wins. A trailing partial line left
// by a crash is dropped when the store is reopened for appending.

#include <compare>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "pkghallu/error.hpp"
#include "pkghallu/language.hpp"
#include "pkghallu/prompt_factory.hpp"

namespace pkghallu {

struct PromptRef {
  SourceLanguage language = SourceLanguage::python;
  std::string stub_id;
  std::string task_id;
  int repetition = 1;

  static PromptRef of(const Prompt& p) { return {p.language, p.stub_id, p.task_id, p.repetition}; }

  friend auto operator<=>(const PromptRef&, const PromptRef&) = default;
};

struct GenerationKey {
  std::string model;
  PromptRef prompt;

  friend auto operator<=>(const GenerationKey&, const GenerationKey&) = default;
};

struct Generation {
  std::string model;
  PromptRef prompt;
  std::string raw_text;
  std::string created_at;
  std::string finish_reason;

  GenerationKey key() const { return {model, prompt}; }

  friend bool operator==(const Generation&, const Generation&) = default;
};

inline constexpr std::string_view kFinishError = "error";

inline nlohmann::json generation_to_json(const Generation& g) {
  return {{"model", g.model},
          {"language", to_string(g.prompt.language)},
          {"stub_id", g.prompt.stub_id},
          {"task_id", g.prompt.task_id},
          {"repetition", g.prompt.repetition},
          {"raw_text", g.raw_text},
          {"created_at", g.created_at},
          {"finish_reason", g.finish_reason}};
}

inline Generation generation_from_json(const nlohmann::json& j) {
  Generation g;
  g.model = j.at("model").get<std::string>();
  g.prompt.language = parse_language(j.at("language").get<std::string>());
  g.prompt.stub_id = j.at("stub_id").get<std::string>();
  g.prompt.task_id = j.at("task_id").get<std::string>();
  g.prompt.repetition = j.at("repetition").get<int>();
  g.raw_text = j.at("raw_text").get<std::string>();
  g.created_at = j.value("created_at", std::string{});
  g.finish_reason = j.value("finish_reason", std::string{});
  return g;
}

class GenerationStore {
 public:
  // Opens (creating if needed) the store at `path` and indexes existing records.
  explicit GenerationStore(std::filesystem::path path) : path_(std::move(path)) {
    if (std::filesystem::exists(path_)) load_existing();
    out_.open(path_, std::ios::binary | std::ios::app);
    if (!out_) throw Error("cannot open generation store " + path_.string());
  }

  GenerationStore(const GenerationStore&) = delete;
  GenerationStore& operator=(const GenerationStore&) = delete;

  const std::filesystem::path& path() const { return path_; }

  bool contains(const GenerationKey& key) const {
    std::lock_guard lock(mu_);
    return records_.contains(key);
  }

  std::size_t size() const {
    std::lock_guard lock(mu_);
    return records_.size();
  }

  // Serialized writer; the line is flushed before returning. Returns false if
  // the key already exists (nothing written).
  bool append(const Generation& g) {
    std::lock_guard lock(mu_);
    if (records_.contains(g.key())) return false;
    out_ << generation_to_json(g).dump() << '\n';
    out_.flush();
    if (!out_) throw Error("write failed for generation store " + path_.string());
    records_.emplace(g.key(), g);
    return true;
  }

  // Snapshot of all records, ordered by key.
  std::vector<Generation> records() const {
    std::lock_guard lock(mu_);
    std::vector<Generation> out;
    out.reserve(records_.size());
    for (const auto& [k, g] : records_) out.push_back(g);
    return out;
  }

 private:
  void load_existing() {
    std::ifstream in(path_, std::ios::binary);
    std::string line;
    std::size_t line_no = 0;
    std::uintmax_t good_bytes = 0;
    bool truncated_tail = false;
    while (std::getline(in, line)) {
      ++line_no;
      bool had_newline = !in.eof();
      if (!had_newline) {
        // No terminating newline: a crash mid-write. Accept only if it parses.
        try {
          auto g = generation_from_json(nlohmann::json::parse(line));
          records_.try_emplace(g.key(), std::move(g));
          good_bytes += line.size();
          needs_newline_ = true;
        } catch (const std::exception&) {
          truncated_tail = true;
        }
        break;
      }
      if (!line.empty()) {
        try {
          auto g = generation_from_json(nlohmann::json::parse(line));
          records_.try_emplace(g.key(), std::move(g));
        } catch (const std::exception& e) {
          throw LoadError(path_.string(), line_no, std::string("corrupt record: ") + e.what());
        }
      }
      good_bytes += line.size() + 1;
    }
    in.close();
    if (truncated_tail) std::filesystem::resize_file(path_, good_bytes);
    if (needs_newline_) {
      std::ofstream fix(path_, std::ios::binary | std::ios::app);
      fix << '\n';
      needs_newline_ = false;
    }
  }

  std::filesystem::path path_;
  mutable std::mutex mu_;
  std::map<GenerationKey, Generation> records_;
  std::ofstream out_;
  bool needs_newline_ = false;
};

// Read-only load of a store file.
inline std::vector<Generation> load_generations(const std::filesystem::path& path) {
  if (!std::filesystem::exists(path)) throw LoadError(path.string(), 0, "generation store not found");
  std::ifstream in(path, std::ios::binary);
  std::map<GenerationKey, Generation> records;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    try {
      auto g = generation_from_json(nlohmann::json::parse(line));
      records.try_emplace(g.key(), std::move(g));
    } catch (const std::exception& e) {
      if (in.eof()) break;  // partial trailing line
      throw LoadError(path.string(), line_no, std::string("corrupt record: ") + e.what());
    }
  }
  std::vector<Generation> out;
  for (auto& [k, g] : records) out.push_back(std::move(g));
  return out;
}

}  // namespace pkghallu
