#pragma once

#include <stdexcept>
#include <string>

namespace core_kge {

/// Bad user-supplied configuration or command usage (CLI exit code 1).
struct ConfigError : std::runtime_error {
  explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Unreadable, malformed, or inconsistent input data (CLI exit code 2).
struct DataError : std::runtime_error {
  explicit DataError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Failure during training or evaluation (CLI exit code 3).
struct RuntimeFailure : std::runtime_error {
  explicit RuntimeFailure(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace core_kge
