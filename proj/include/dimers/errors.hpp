#pragma once

#include <stdexcept>

namespace dimers {

/// A numerical routine failed to converge or to reach its requested tolerance.
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid or inconsistent run configuration.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace dimers
