#pragma once

#include <stdexcept>
#include <string>

namespace nodalcone {

// Invalid or inconsistent user-provided configuration (CLI exit code 2).
struct ConfigError : std::runtime_error {
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

// A numeric computation could not reach its accuracy target (CLI exit code 3).
struct NumericError : std::runtime_error {
  explicit NumericError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace nodalcone
