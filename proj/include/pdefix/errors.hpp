#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace pdefix {

enum class ErrorCode {
  InvalidArgument,
  IoError,
  DimensionMismatch,
  SyntaxError,
  ComponentOutOfRange,
  MissingSection,
  UnsupportedTerm,
  ZeroModeSingular,
  IllConditioned,
  ConstraintArityMismatch,
  SlabNonConvergence,
  DivergenceDetected,
  MaxIterExceeded,
  InsufficientData,
  OracleNonConvergence,
  TooManyUnknowns,
  ShapeMismatch,
  UnknownProblem,
};

/// Stable name of an error code, e.g. "ZeroModeSingular".
std::string_view error_name(ErrorCode code) noexcept;

/// Library exception. what() always starts with the error name followed by
/// ": " and a human-readable detail.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& detail);

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace pdefix
