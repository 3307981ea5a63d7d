#pragma once

#include <stdexcept>
#include <string>

namespace covertrack {

// Invalid configuration values, unknown presets, malformed config files.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

// Missing, unreadable, or corrupt files (checkpoints, traces).
class ArtifactError : public std::runtime_error {
 public:
  explicit ArtifactError(const std::string& what) : std::runtime_error(what) {}
};

// Non-finite values during training or inference.
class NumericError : public std::runtime_error {
 public:
  explicit NumericError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace covertrack
