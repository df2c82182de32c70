#pragma once

#include <cstddef>
#include <cstdint>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <json.hpp>

#include "pkghallu/embedded_data.hpp"
#include "pkghallu/error.hpp"
#include "pkghallu/language.hpp"

namespace pkghallu {

inline constexpr std::string_view kLanguagePlaceholder = "<language>";
inline constexpr std::string_view kTaskPlaceholder = "<task>";

struct RequestStub {
  std::string id;
  std::string template_text;

  friend bool operator==(const RequestStub&, const RequestStub&) = default;
};

struct CodingTask {
  std::string id;
  std::string description;
  bool induced = false;  // the task names a package or system that does not exist

  friend bool operator==(const CodingTask&, const CodingTask&) = default;
};

struct Prompt {
  std::string text;
  SourceLanguage language = SourceLanguage::python;
  std::string stub_id;
  std::string task_id;
  bool induced = false;
  int repetition = 1;

  friend bool operator==(const Prompt&, const Prompt&) = default;
};

struct PromptMatrix {
  std::vector<RequestStub> stubs;
  std::vector<CodingTask> tasks;
};

namespace detail {

inline std::string replace_all(std::string s, std::string_view from, std::string_view to) {
  std::size_t pos = 0;
  while ((pos = s.find(from, pos)) != std::string::npos) {
    s.replace(pos, from.size(), to);
    pos += to.size();
  }
  return s;
}

template <typename T, typename IdOf>
void require_unique_ids(const std::vector<T>& items, IdOf id_of, std::string_view what) {
  std::set<std::string_view> seen;
  for (const auto& item : items) {
    const std::string& id = id_of(item);
    if (id.empty()) throw ConfigError(std::string(what) + " with empty id");
    if (!seen.insert(id).second) throw ConfigError("duplicate " + std::string(what) + " id '" + id + "'");
  }
}

}  // namespace detail

inline void validate_matrix(const std::vector<RequestStub>& stubs, const std::vector<CodingTask>& tasks) {
  detail::require_unique_ids(stubs, [](const RequestStub& s) -> const std::string& { return s.id; },
                             "stub");
  detail::require_unique_ids(tasks, [](const CodingTask& t) -> const std::string& { return t.id; },
                             "task");
  for (const auto& s : stubs)
    if (s.template_text.find(kTaskPlaceholder) == std::string::npos)
      throw ConfigError("stub '" + s.id + "' has no <task> placeholder");
  for (const auto& t : tasks)
    if (t.description.empty()) throw ConfigError("task '" + t.id + "' has an empty description");
}

// Cartesian product ordered by (language, stub, task, repetition), each in
// the order given by the caller.
inline std::vector<Prompt> build_prompts(const std::vector<RequestStub>& stubs,
                                         const std::vector<CodingTask>& tasks,
                                         const std::vector<SourceLanguage>& languages, int repetitions) {
  if (repetitions < 0) throw InputError("repetitions must be >= 0");
  validate_matrix(stubs, tasks);
  std::vector<Prompt> out;
  out.reserve(stubs.size() * tasks.size() * languages.size() * std::size_t(repetitions));
  for (SourceLanguage lang : languages) {
    for (const auto& stub : stubs) {
      std::string with_lang =
          detail::replace_all(stub.template_text, kLanguagePlaceholder, display_name(lang));
      for (const auto& task : tasks) {
        std::string text = detail::replace_all(with_lang, kTaskPlaceholder, task.description);
        for (int rep = 1; rep <= repetitions; ++rep)
          out.push_back({text, lang, stub.id, task.id, task.induced, rep});
      }
    }
  }
  return out;
}

inline PromptMatrix matrix_from_json(const nlohmann::json& j) {
  PromptMatrix m;
  try {
    for (const auto& s : j.at("stubs"))
      m.stubs.push_back({s.at("id").get<std::string>(), s.at("template").get<std::string>()});
    for (const auto& t : j.at("tasks"))
      m.tasks.push_back({t.at("id").get<std::string>(), t.at("description").get<std::string>(),
                         t.value("induced", false)});
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("prompt matrix: ") + e.what());
  }
  validate_matrix(m.stubs, m.tasks);
  return m;
}

inline nlohmann::json matrix_to_json(const PromptMatrix& m) {
  nlohmann::json j{{"stubs", nlohmann::json::array()}, {"tasks", nlohmann::json::array()}};
  for (const auto& s : m.stubs) j["stubs"].push_back({{"id", s.id}, {"template", s.template_text}});
  for (const auto& t : m.tasks)
    j["tasks"].push_back({{"id", t.id}, {"description", t.description}, {"induced", t.induced}});
  return j;
}

// The seven request stubs and thirteen coding tasks. Only the StrombergDB
// task defaults to induced: no registry carries a package by that name.
inline PromptMatrix default_matrix() {
  return matrix_from_json(nlohmann::json::parse(embedded::default_matrix));
}

// FNV-1a over the canonical prompt list; identifies a matrix in run metadata.
inline std::string matrix_hash(const std::vector<Prompt>& prompts) {
  std::uint64_t h = 1469598103934665603ull;
  auto mix = [&](std::string_view s) {
    for (unsigned char c : s) {
      h ^= c;
      h *= 1099511628211ull;
    }
    h ^= 0xff;
    h *= 1099511628211ull;
  };
  for (const auto& p : prompts) {
    mix(to_string(p.language));
    mix(p.stub_id);
    mix(p.task_id);
    mix(std::to_string(p.repetition));
    mix(p.induced ? "1" : "0");
    mix(p.text);
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace pkghallu
