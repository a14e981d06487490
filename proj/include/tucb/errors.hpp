#pragma once

#include <stdexcept>
#include <string>

namespace tucb {

/// A point fell outside the declared domain box. Carries the first
/// offending dimension so callers can report which coordinate is bad.
class DomainViolation : public std::runtime_error {
 public:
  DomainViolation(std::string message, int dimension)
      : std::runtime_error(std::move(message)), dimension_(dimension) {}
  int dimension() const noexcept { return dimension_; }

 private:
  int dimension_;
};

/// Invalid or inconsistent configuration (bad flag combinations, missing
/// horizon, malformed schedules). Maps to exit code 2 in the CLI.
class ConfigError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Malformed or out-of-order ask/tell traffic. Maps to exit code 3.
class ProtocolError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Inconsistent trace or audit input data.
class DataError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace tucb
