#pragma once

// Experiment configuration shared by `probe run` and `analyze`.
//
//   {
//     "matrix": "default",                 // or a path to a matrix JSON
//     "profiles": "models.json",
//     "catalogs": {"pypi": "pypi.csv", "npm": "npm.csv", "crates": "crates.csv"},
//     "languages": ["python", "javascript", "rust"],
//     "repetitions": 5,
//     "sampling": {"temperature": 0.7, "max_tokens": 1024},
//     "parallelism": 4,
//     "retry": {"max_retries": 3, "initial_backoff_ms": 500},
//     "timeout_seconds": 120,
//     "trial_unit": "generation",
//     "builtins_dir": null,
//     "output_dir": "run"
//   }
//
// Relative paths resolve against the directory holding the config file.

#include <chrono>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "pkghallu/error.hpp"
#include "pkghallu/http.hpp"
#include "pkghallu/language.hpp"
#include "pkghallu/probe_runner.hpp"
#include "pkghallu/report.hpp"
#include "pkghallu/verdict_metrics.hpp"

namespace pkghallu {

struct RunConfig {
  std::optional<std::filesystem::path> matrix;  // empty: the built-in matrix
  std::filesystem::path profiles;
  std::map<RegistryId, std::filesystem::path> catalogs;
  std::vector<SourceLanguage> languages{kAllLanguages.begin(), kAllLanguages.end()};
  int repetitions = 5;
  Sampling sampling;
  int parallelism = 4;
  RetryPolicy retry;
  std::chrono::seconds timeout{120};
  TrialUnit trial_unit = TrialUnit::generation;
  std::optional<std::filesystem::path> builtins_dir;
  std::filesystem::path output_dir;

  std::filesystem::path store_path() const { return output_dir / "generations.jsonl"; }
  std::filesystem::path verdicts_path() const { return output_dir / "verdicts.json"; }
};

inline void validate_run_config(const RunConfig& c) {
  auto must_exist = [](const std::filesystem::path& p, const char* what) {
    if (!std::filesystem::exists(p)) throw ConfigError(std::string(what) + " not found: " + p.string());
  };
  if (c.matrix) must_exist(*c.matrix, "matrix");
  must_exist(c.profiles, "profiles");
  if (c.builtins_dir) must_exist(*c.builtins_dir, "builtins directory");
  if (c.languages.empty()) throw ConfigError("no languages configured");
  for (auto lang : c.languages) {
    auto it = c.catalogs.find(registry_for(lang));
    if (it == c.catalogs.end())
      throw ConfigError("no " + std::string(to_string(registry_for(lang))) + " catalog for " +
                        std::string(to_string(lang)));
    must_exist(it->second, "catalog");
  }
  if (c.repetitions < 1) throw ConfigError("repetitions must be >= 1");
  if (c.parallelism < 1) throw ConfigError("parallelism must be >= 1");
  if (c.sampling.max_tokens < 1) throw ConfigError("sampling.max_tokens must be >= 1");
  if (c.retry.max_retries < 0) throw ConfigError("retry.max_retries must be >= 0");
  if (c.output_dir.empty()) throw ConfigError("output_dir is required");
}

inline RunConfig run_config_from_json(const nlohmann::json& j, const std::filesystem::path& base_dir) {
  auto resolve = [&](const std::string& p) {
    std::filesystem::path path(p);
    return path.is_absolute() ? path : base_dir / path;
  };
  RunConfig c;
  try {
    auto matrix = j.value("matrix", std::string("default"));
    if (matrix != "default") c.matrix = resolve(matrix);
    c.profiles = resolve(j.at("profiles").get<std::string>());
    for (const auto& [reg, path] : j.at("catalogs").items())
      c.catalogs[parse_registry(reg)] = resolve(path.get<std::string>());
    if (j.contains("languages")) {
      c.languages.clear();
      for (const auto& l : j["languages"]) c.languages.push_back(parse_language(l.get<std::string>()));
    }
    c.repetitions = j.value("repetitions", c.repetitions);
    if (j.contains("sampling")) {
      c.sampling.temperature = j["sampling"].value("temperature", c.sampling.temperature);
      c.sampling.max_tokens = j["sampling"].value("max_tokens", c.sampling.max_tokens);
    }
    c.parallelism = j.value("parallelism", c.parallelism);
    if (j.contains("retry")) {
      c.retry.max_retries = j["retry"].value("max_retries", c.retry.max_retries);
      c.retry.initial_backoff =
          std::chrono::milliseconds(j["retry"].value("initial_backoff_ms", c.retry.initial_backoff.count()));
    }
    c.timeout = std::chrono::seconds(j.value("timeout_seconds", c.timeout.count()));
    c.trial_unit = parse_trial_unit(j.value("trial_unit", std::string("generation")));
    if (j.contains("builtins_dir") && !j["builtins_dir"].is_null())
      c.builtins_dir = resolve(j["builtins_dir"].get<std::string>());
    c.output_dir = resolve(j.at("output_dir").get<std::string>());
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("run config: ") + e.what());
  } catch (const InputError& e) {
    throw ConfigError(std::string("run config: ") + e.what());
  }
  validate_run_config(c);
  return c;
}

inline RunConfig load_run_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw LoadError(path.string(), 0, "cannot open run config");
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw LoadError(path.string(), 0, e.what());
  }
  return run_config_from_json(j, std::filesystem::absolute(path).parent_path());
}

}  // namespace pkghallu
