#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace pkghallu {

// Base for every error the library throws.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Caller supplied a value outside an operation's domain.
class InputError : public Error {
 public:
  using Error::Error;
};

// A profile, run config, or matrix document is unusable.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// A file could not be parsed. line() is 1-based, 0 when not line-specific.
class LoadError : public Error {
 public:
  LoadError(std::string path, std::size_t line, const std::string& what)
      : Error(path + (line ? ":" + std::to_string(line) : std::string{}) + ": " + what),
        path_(std::move(path)),
        line_(line) {}

  const std::string& path() const { return path_; }
  std::size_t line() const { return line_; }

 private:
  std::string path_;
  std::size_t line_;
};

// Transport failure or non-success HTTP status after retries.
class NetworkError : public Error {
 public:
  using Error::Error;
};

}  // namespace pkghallu
