#ifndef PWLMILP_ERRORS_HPP
#define PWLMILP_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace pwlmilp {

enum class ErrorCode {
  DegenerateInput,
  DuplicatePoint,
  RefinementLimit,
  Degenerate,
  ParseError,
  ValidationError,
  SizeLimit,
  NotAnEdge,
  SpecIncomplete,
  OrderingUnavailable,
  IoError,
  TooManyBinaries,
  Infeasible,
  NoCandidate,
  SolverNotFound,
  ValidationFailed,
  DomainMismatch,
  MaxIterExceeded,
};

/// Library-wide exception carrying a machine-checkable code.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}
  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

inline const char* to_string(ErrorCode c) {
  switch (c) {
    case ErrorCode::DegenerateInput: return "DegenerateInput";
    case ErrorCode::DuplicatePoint: return "DuplicatePoint";
    case ErrorCode::RefinementLimit: return "RefinementLimit";
    case ErrorCode::Degenerate: return "Degenerate";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::ValidationError: return "ValidationError";
    case ErrorCode::SizeLimit: return "SizeLimit";
    case ErrorCode::NotAnEdge: return "NotAnEdge";
    case ErrorCode::SpecIncomplete: return "SpecIncomplete";
    case ErrorCode::OrderingUnavailable: return "OrderingUnavailable";
    case ErrorCode::IoError: return "IoError";
    case ErrorCode::TooManyBinaries: return "TooManyBinaries";
    case ErrorCode::Infeasible: return "Infeasible";
    case ErrorCode::NoCandidate: return "NoCandidate";
    case ErrorCode::SolverNotFound: return "SolverNotFound";
    case ErrorCode::ValidationFailed: return "ValidationFailed";
    case ErrorCode::DomainMismatch: return "DomainMismatch";
    case ErrorCode::MaxIterExceeded: return "MaxIterExceeded";
  }
  return "Unknown";
}

}  // namespace pwlmilp

#endif  // PWLMILP_ERRORS_HPP
