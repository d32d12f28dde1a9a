#pragma once

#include <stdexcept>
#include <string>

namespace relaydiff {

/// Invalid arguments or configuration handed to an operation (bad profile
/// name, same device on both sides of a split, oracle size guard, ...).
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A document or value violates a schema or invariant. `field()` names the
/// offending location, e.g. "devices[3].id".
class ValidationError : public std::runtime_error {
 public:
  ValidationError(std::string field, const std::string& message)
      : std::runtime_error(field + ": " + message), field_(std::move(field)) {}

  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

class LineageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace relaydiff
