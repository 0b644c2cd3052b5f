#pragma once

#include <stdexcept>
#include <string>

namespace mad {

// Raised when a caller-supplied parameter violates its contract. field() names
// the offending parameter (e.g. "schedule.a") so config front ends can report
// a path.
class ParameterError : public std::invalid_argument {
 public:
  ParameterError(std::string field, std::string message)
      : std::invalid_argument(field + ": " + message), field_(std::move(field)), detail_(std::move(message)) {}

  const std::string& field() const noexcept { return field_; }
  const std::string& detail() const noexcept { return detail_; }

  // Same error with `prefix` prepended to the field path.
  ParameterError nested(const std::string& prefix) const { return {prefix + field_, detail_}; }

 private:
  std::string field_;
  std::string detail_;
};

// An internal invariant of the design was violated (e.g. an arm was realized
// with recorded probability zero).
class InvariantError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

}  // namespace mad
