#pragma once

#include <stdexcept>
#include <string>

namespace cdasym {

enum class ErrorKind {
  InvalidField,
  InvalidExponent,
  ShapeMismatch,
  NonPositiveTime,
  DomainTooSmall,
  InternalError,
  StepRejected,
  InvalidSamples,
  InvalidRegime,
  InvalidConfig,
};

inline const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidField: return "InvalidField";
    case ErrorKind::InvalidExponent: return "InvalidExponent";
    case ErrorKind::ShapeMismatch: return "ShapeMismatch";
    case ErrorKind::NonPositiveTime: return "NonPositiveTime";
    case ErrorKind::DomainTooSmall: return "DomainTooSmall";
    case ErrorKind::InternalError: return "InternalError";
    case ErrorKind::StepRejected: return "StepRejected";
    case ErrorKind::InvalidSamples: return "InvalidSamples";
    case ErrorKind::InvalidRegime: return "InvalidRegime";
    case ErrorKind::InvalidConfig: return "InvalidConfig";
  }
  return "Unknown";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

// Raised when a time step would violate a stability guard.
class StepRejected : public Error {
 public:
  StepRejected(double suggested_dt, const std::string& what)
      : Error(ErrorKind::StepRejected, what), suggested_dt_(suggested_dt) {}

  double suggested_dt() const noexcept { return suggested_dt_; }

 private:
  double suggested_dt_;
};

}  // namespace cdasym
