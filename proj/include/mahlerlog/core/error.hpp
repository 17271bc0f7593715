#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace mahlerlog {

enum class ErrorKind {
  DivisionByZero,
  SpecMismatch,
  UnsupportedRootLevel,
  NotInvertible,
  VariableMismatch,
  PoleAtPoint,
  PrecisionExhausted,
  NoRootInField,
  NotNeeded,
  NonpositiveValuation,
  SigmaNotFixingBeta,
  PoleAtOrbitPoint,
  InsufficientPrecision,
  ReducibleInput,
  EvaluationPole,
  PrecisionTooLow,
  DegenerateInput,
  SingularOrbitMatrix,
  ConfigError,
  InvalidArgument,
};

inline std::string_view to_string(ErrorKind k) {
  switch (k) {
    case ErrorKind::DivisionByZero: return "DivisionByZero";
    case ErrorKind::SpecMismatch: return "SpecMismatch";
    case ErrorKind::UnsupportedRootLevel: return "UnsupportedRootLevel";
    case ErrorKind::NotInvertible: return "NotInvertible";
    case ErrorKind::VariableMismatch: return "VariableMismatch";
    case ErrorKind::PoleAtPoint: return "PoleAtPoint";
    case ErrorKind::PrecisionExhausted: return "PrecisionExhausted";
    case ErrorKind::NoRootInField: return "NoRootInField";
    case ErrorKind::NotNeeded: return "NotNeeded";
    case ErrorKind::NonpositiveValuation: return "NonpositiveValuation";
    case ErrorKind::SigmaNotFixingBeta: return "SigmaNotFixingBeta";
    case ErrorKind::PoleAtOrbitPoint: return "PoleAtOrbitPoint";
    case ErrorKind::InsufficientPrecision: return "InsufficientPrecision";
    case ErrorKind::ReducibleInput: return "ReducibleInput";
    case ErrorKind::EvaluationPole: return "EvaluationPole";
    case ErrorKind::PrecisionTooLow: return "PrecisionTooLow";
    case ErrorKind::DegenerateInput: return "DegenerateInput";
    case ErrorKind::SingularOrbitMatrix: return "SingularOrbitMatrix";
    case ErrorKind::ConfigError: return "ConfigError";
    case ErrorKind::InvalidArgument: return "InvalidArgument";
  }
  return "Unknown";
}

/// Every failure raised by the library carries a machine-readable kind; the CLI
/// turns it into the error tag of a FAILED record.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) { throw Error(kind, what); }

inline void require(bool cond, ErrorKind kind, const std::string& what) {
  if (!cond) fail(kind, what);
}

}  // namespace mahlerlog
