#pragma once

#include <stdexcept>
#include <string>

namespace textshift {

// Raised for invalid configuration or invalid user input before any work
// starts. The CLI maps this to exit code 2; every other exception maps to 1.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace textshift
