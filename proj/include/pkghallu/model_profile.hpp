#pragma once

#include <chrono>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "pkghallu/date.hpp"
#include "pkghallu/embedded_data.hpp"
#include "pkghallu/error.hpp"

namespace pkghallu {

struct Endpoint {
  std::string base_url;     // OpenAI-compatible API root, e.g. http://host:8000/v1
  std::string model_id;
  std::string api_key_env;  // environment variable holding the bearer token; empty for none

  friend bool operator==(const Endpoint&, const Endpoint&) = default;
};

struct ModelProfile {
  std::string name;
  double params_billions = 0;
  bool params_approximate = false;
  bool is_coding = false;
  bool open_weights = true;
  std::optional<Date> knowledge_cutoff;
  std::optional<Date> first_publication;
  std::optional<double> humaneval;  // percent
  std::optional<double> mbpp;       // percent
  Endpoint endpoint;

  friend bool operator==(const ModelProfile&, const ModelProfile&) = default;
};

// When no knowledge cutoff is published, packages first registered less than
// this long before the model's first publication are treated as unknown to it.
inline constexpr std::chrono::days kPublicationCutoffLag{90};

inline Date effective_cutoff(const ModelProfile& profile) {
  if (profile.knowledge_cutoff) return *profile.knowledge_cutoff;
  if (profile.first_publication) return *profile.first_publication - kPublicationCutoffLag;
  throw ConfigError("model '" + profile.name +
                    "' has neither knowledge_cutoff nor first_publication");
}

inline void validate_profile(const ModelProfile& p) {
  if (p.name.empty()) throw ConfigError("model profile with empty name");
  if (!(p.params_billions > 0)) throw ConfigError("model '" + p.name + "': params_billions must be > 0");
  for (auto [label, v] : {std::pair{"humaneval", p.humaneval}, std::pair{"mbpp", p.mbpp}})
    if (v && (*v < 0 || *v > 100))
      throw ConfigError("model '" + p.name + "': " + label + " must be within [0, 100]");
}

namespace detail {
inline std::optional<Date> optional_date(const nlohmann::json& j, const char* key) {
  if (!j.contains(key) || j[key].is_null()) return std::nullopt;
  auto s = j[key].get<std::string>();
  if (s.empty()) return std::nullopt;
  return Date::parse(s);
}
inline std::optional<double> optional_number(const nlohmann::json& j, const char* key) {
  if (!j.contains(key) || j[key].is_null()) return std::nullopt;
  return j[key].get<double>();
}
}  // namespace detail

inline ModelProfile profile_from_json(const nlohmann::json& j) {
  ModelProfile p;
  try {
    p.name = j.at("name").get<std::string>();
    p.params_billions = j.at("params_billions").get<double>();
    p.params_approximate = j.value("params_approximate", false);
    p.is_coding = j.at("is_coding").get<bool>();
    p.open_weights = j.value("open_weights", true);
    p.knowledge_cutoff = detail::optional_date(j, "knowledge_cutoff");
    p.first_publication = detail::optional_date(j, "first_publication");
    p.humaneval = detail::optional_number(j, "humaneval");
    p.mbpp = detail::optional_number(j, "mbpp");
    if (j.contains("endpoint")) {
      const auto& e = j["endpoint"];
      p.endpoint = {e.value("base_url", std::string{}), e.value("model_id", std::string{}),
                    e.value("api_key_env", std::string{})};
    }
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("model profile: ") + e.what());
  } catch (const InputError& e) {
    throw ConfigError(std::string("model profile: ") + e.what());
  }
  validate_profile(p);
  return p;
}

inline nlohmann::json profile_to_json(const ModelProfile& p) {
  auto date_or_null = [](const std::optional<Date>& d) -> nlohmann::json {
    return d ? nlohmann::json(d->to_string()) : nlohmann::json(nullptr);
  };
  auto num_or_null = [](const std::optional<double>& v) -> nlohmann::json {
    return v ? nlohmann::json(*v) : nlohmann::json(nullptr);
  };
  return {{"name", p.name},
          {"params_billions", p.params_billions},
          {"params_approximate", p.params_approximate},
          {"is_coding", p.is_coding},
          {"open_weights", p.open_weights},
          {"knowledge_cutoff", date_or_null(p.knowledge_cutoff)},
          {"first_publication", date_or_null(p.first_publication)},
          {"humaneval", num_or_null(p.humaneval)},
          {"mbpp", num_or_null(p.mbpp)},
          {"endpoint",
           {{"base_url", p.endpoint.base_url},
            {"model_id", p.endpoint.model_id},
            {"api_key_env", p.endpoint.api_key_env}}}};
}

inline std::vector<ModelProfile> profiles_from_json(const nlohmann::json& doc) {
  std::vector<ModelProfile> out;
  const auto& list = doc.is_array() ? doc : doc.at("models");
  for (const auto& m : list) out.push_back(profile_from_json(m));
  for (std::size_t i = 0; i < out.size(); ++i)
    for (std::size_t k = i + 1; k < out.size(); ++k)
      if (out[i].name == out[k].name) throw ConfigError("duplicate model name '" + out[i].name + "'");
  return out;
}

inline std::vector<ModelProfile> load_profiles(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw LoadError(path.string(), 0, "cannot open model profiles");
  try {
    return profiles_from_json(nlohmann::json::parse(in));
  } catch (const nlohmann::json::parse_error& e) {
    throw LoadError(path.string(), 0, e.what());
  }
}

// The eleven assessed models (parameters, coding flag, benchmark scores).
// Dates and endpoints are blank and must be supplied before probing.
inline std::vector<ModelProfile> reference_profiles() {
  return profiles_from_json(nlohmann::json::parse(embedded::model_profiles));
}

}  // namespace pkghallu
