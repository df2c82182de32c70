#pragma once

#include <array>
#include <optional>
#include <string>
#include <string_view>

#include "pkghallu/error.hpp"

namespace pkghallu {

enum class SourceLanguage { python, javascript, rust };

enum class RegistryId { npm, pypi, crates };

inline constexpr std::array<SourceLanguage, 3> kAllLanguages{
    SourceLanguage::python, SourceLanguage::javascript, SourceLanguage::rust};

inline constexpr std::string_view to_string(SourceLanguage lang) {
  switch (lang) {
    case SourceLanguage::python: return "python";
    case SourceLanguage::javascript: return "javascript";
    case SourceLanguage::rust: return "rust";
  }
  return "?";
}

// Name used when substituting into prompt templates.
inline constexpr std::string_view display_name(SourceLanguage lang) {
  switch (lang) {
    case SourceLanguage::python: return "Python";
    case SourceLanguage::javascript: return "JavaScript";
    case SourceLanguage::rust: return "Rust";
  }
  return "?";
}

inline std::optional<SourceLanguage> try_parse_language(std::string_view s) {
  if (s == "python") return SourceLanguage::python;
  if (s == "javascript") return SourceLanguage::javascript;
  if (s == "rust") return SourceLanguage::rust;
  return std::nullopt;
}

inline SourceLanguage parse_language(std::string_view s) {
  if (auto l = try_parse_language(s)) return *l;
  throw InputError("unknown language '" + std::string(s) + "' (expected python, javascript or rust)");
}

inline constexpr std::string_view to_string(RegistryId r) {
  switch (r) {
    case RegistryId::npm: return "npm";
    case RegistryId::pypi: return "pypi";
    case RegistryId::crates: return "crates";
  }
  return "?";
}

inline RegistryId parse_registry(std::string_view s) {
  if (s == "npm") return RegistryId::npm;
  if (s == "pypi") return RegistryId::pypi;
  if (s == "crates") return RegistryId::crates;
  throw InputError("unknown registry '" + std::string(s) + "' (expected npm, pypi or crates)");
}

inline constexpr RegistryId registry_for(SourceLanguage lang) {
  switch (lang) {
    case SourceLanguage::javascript: return RegistryId::npm;
    case SourceLanguage::python: return RegistryId::pypi;
    case SourceLanguage::rust: return RegistryId::crates;
  }
  return RegistryId::pypi;
}

inline constexpr SourceLanguage language_for(RegistryId reg) {
  switch (reg) {
    case RegistryId::npm: return SourceLanguage::javascript;
    case RegistryId::pypi: return SourceLanguage::python;
    case RegistryId::crates: return SourceLanguage::rust;
  }
  return SourceLanguage::python;
}

}  // namespace pkghallu
