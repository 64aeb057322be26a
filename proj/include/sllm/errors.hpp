#pragma once

#include <stdexcept>
#include <string>

namespace sllm {

// Base for all library errors.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Dimension disagreement between operands.
class ShapeError : public Error {
 public:
  explicit ShapeError(const std::string& msg) : Error(msg) {}
};

// Bad configuration value or unknown key.
class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& msg) : Error(msg) {}
};

// Malformed input file (bad row, bad magic, version mismatch, truncation).
class FormatError : public Error {
 public:
  explicit FormatError(const std::string& msg) : Error(msg) {}
};

// A user is missing a feature group the model requires.
class FeatureError : public Error {
 public:
  explicit FeatureError(const std::string& msg) : Error(msg) {}
};

// Unknown edge type id.
class RegistryError : public Error {
 public:
  explicit RegistryError(const std::string& msg) : Error(msg) {}
};

// Filesystem failure, carries the offending path.
class IoError : public Error {
 public:
  explicit IoError(const std::string& msg) : Error(msg) {}
};

}  // namespace sllm
