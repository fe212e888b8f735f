#pragma once

#include <stdexcept>
#include <string>

namespace evonet {

// Error taxonomy used by the CLI to pick an exit status. Library code throws
// the closest category; anything else that escapes maps to a generic failure.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

class DataError : public std::runtime_error {
 public:
  explicit DataError(const std::string& msg) : std::runtime_error(msg) {}
};

class NumericError : public std::runtime_error {
 public:
  explicit NumericError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace evonet
