#pragma once

#include <stdexcept>
#include <string>

namespace cqft {

/// Invalid configuration or precondition violation (CLI exit code 2).
class ConfigError : public std::invalid_argument {
 public:
  explicit ConfigError(const std::string& what) : std::invalid_argument(what) {}
};

/// Numerical failure during a run: norm drift, eigensolver breakdown (CLI exit code 3).
class NumericsError : public std::runtime_error {
 public:
  explicit NumericsError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace cqft
