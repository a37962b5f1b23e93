#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace fourthkind {

/// Machine-readable failure classes. The CLI maps each to an exit code.
enum class ErrorCategory {
  domain,
  state,
  infeasible,
  nonconverged,
  calibration,
  io,
  inconsistent_support,
};

std::string_view to_string(ErrorCategory category);

class Error : public std::runtime_error {
 public:
  Error(ErrorCategory category, const std::string& message)
      : std::runtime_error(message), category_(category) {}

  ErrorCategory category() const noexcept { return category_; }

 private:
  ErrorCategory category_;
};

class DomainError : public Error {
 public:
  explicit DomainError(const std::string& message) : Error(ErrorCategory::domain, message) {}
};

class StateError : public Error {
 public:
  explicit StateError(const std::string& message) : Error(ErrorCategory::state, message) {}
};

class InfeasibleError : public Error {
 public:
  explicit InfeasibleError(const std::string& message)
      : Error(ErrorCategory::infeasible, message) {}
};

class CalibrationError : public Error {
 public:
  explicit CalibrationError(const std::string& message)
      : Error(ErrorCategory::calibration, message) {}
};

class IoError : public Error {
 public:
  explicit IoError(const std::string& message) : Error(ErrorCategory::io, message) {}
};

class InconsistentSupportError : public Error {
 public:
  explicit InconsistentSupportError(const std::string& message)
      : Error(ErrorCategory::inconsistent_support, message) {}
};

}  // namespace fourthkind
