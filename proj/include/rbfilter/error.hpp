#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace rbf {

/// Base of every exception thrown by the library. The CLI maps the concrete
/// type to a process exit code.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid configuration or a mismatch between inputs (exit code 2).
class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& what) : Error(what), issues_{what} {}
  explicit ConfigError(std::vector<std::string> issues)
      : Error(join(issues)), issues_(std::move(issues)) {}

  const std::vector<std::string>& issues() const noexcept { return issues_; }

 private:
  static std::string join(const std::vector<std::string>& issues) {
    std::string out;
    for (const auto& s : issues) {
      if (!out.empty()) out += "; ";
      out += s;
    }
    return out;
  }
  std::vector<std::string> issues_;
};

/// Argument outside the domain of a physical formula (exit code 2).
class DomainError : public ConfigError {
 public:
  using ConfigError::ConfigError;
};

/// Malformed or unusable data: grids, measured spectra, frame streams (exit code 3).
class DataError : public Error {
 public:
  using Error::Error;
};

/// File could not be read or written (exit code 3).
class IoError : public DataError {
 public:
  using DataError::DataError;
};

/// A numerical procedure failed or its result is undefined (exit code 4).
class NumericalError : public Error {
 public:
  using Error::Error;
};

inline int exit_code_for(const std::exception& e) {
  if (dynamic_cast<const ConfigError*>(&e)) return 2;
  if (dynamic_cast<const DataError*>(&e)) return 3;
  if (dynamic_cast<const NumericalError*>(&e)) return 4;
  return 4;
}

}  // namespace rbf
