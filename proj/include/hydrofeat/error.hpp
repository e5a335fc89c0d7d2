#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace hydrofeat {

enum class ErrorCode {
  MissingData,
  TooShort,
  NonFinite,
  ZeroVariance,
  LagTooLarge,
  NumericalSingularity,
  DegenerateRange,
  SingularDesign,
  SingularFit,
  DegenerateVariance,
  DegenerateTarget,
  EmptyPredictors,
  ColumnMismatch,
  NoOobCoverage,
  ConstantVector,
  BadK,
  LengthMismatch,
  ParseError,
  IncompleteRecord,
  UnknownAttribute,
  Config,
};

inline std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::MissingData: return "MissingData";
    case ErrorCode::TooShort: return "TooShort";
    case ErrorCode::NonFinite: return "NonFinite";
    case ErrorCode::ZeroVariance: return "ZeroVariance";
    case ErrorCode::LagTooLarge: return "LagTooLarge";
    case ErrorCode::NumericalSingularity: return "NumericalSingularity";
    case ErrorCode::DegenerateRange: return "DegenerateRange";
    case ErrorCode::SingularDesign: return "SingularDesign";
    case ErrorCode::SingularFit: return "SingularFit";
    case ErrorCode::DegenerateVariance: return "DegenerateVariance";
    case ErrorCode::DegenerateTarget: return "DegenerateTarget";
    case ErrorCode::EmptyPredictors: return "EmptyPredictors";
    case ErrorCode::ColumnMismatch: return "ColumnMismatch";
    case ErrorCode::NoOobCoverage: return "NoOobCoverage";
    case ErrorCode::ConstantVector: return "ConstantVector";
    case ErrorCode::BadK: return "BadK";
    case ErrorCode::LengthMismatch: return "LengthMismatch";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::IncompleteRecord: return "IncompleteRecord";
    case ErrorCode::UnknownAttribute: return "UnknownAttribute";
    case ErrorCode::Config: return "Config";
  }
  return "Unknown";
}

/// Every failure in the library is reported as an Error carrying a code, so
/// callers can branch on the kind without parsing messages.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code), detail_(what) {}

  ErrorCode code() const noexcept { return code_; }
  /// Message without the code prefix.
  const std::string& detail() const noexcept { return detail_; }

 private:
  ErrorCode code_;
  std::string detail_;
};

/// Same code, message prefixed with `context`.
inline Error with_context(const Error& e, const std::string& context) { return Error(e.code(), context + e.detail()); }

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) { throw Error(code, what); }

}  // namespace hydrofeat
