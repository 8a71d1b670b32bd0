#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace sisou {

// Raised when a computation produces a non-finite value. Carries the node or
// step index at which the problem was detected.
class NumericalError : public std::runtime_error {
 public:
  NumericalError(const std::string& what, std::size_t index)
      : std::runtime_error(what + " (at index " + std::to_string(index) + ")"), index_(index) {}

  std::size_t index() const noexcept { return index_; }

 private:
  std::size_t index_;
};

// Bad user-supplied configuration; `field` names the offending key.
class ConfigError : public std::invalid_argument {
 public:
  ConfigError(const std::string& field, const std::string& what)
      : std::invalid_argument(field + ": " + what), field_(field) {}

  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

// Failure while producing path `path()` of an ensemble or study.
class PathError : public std::runtime_error {
 public:
  PathError(std::size_t path, const std::string& what)
      : std::runtime_error("path " + std::to_string(path) + ": " + what), path_(path) {}

  std::size_t path() const noexcept { return path_; }

 private:
  std::size_t path_;
};

}  // namespace sisou
