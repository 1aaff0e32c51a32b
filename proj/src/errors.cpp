#include "pdefix/errors.hpp"

namespace pdefix {

std::string_view error_name(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::IoError: return "IoError";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::SyntaxError: return "SyntaxError";
    case ErrorCode::ComponentOutOfRange: return "ComponentOutOfRange";
    case ErrorCode::MissingSection: return "MissingSection";
    case ErrorCode::UnsupportedTerm: return "UnsupportedTerm";
    case ErrorCode::ZeroModeSingular: return "ZeroModeSingular";
    case ErrorCode::IllConditioned: return "IllConditioned";
    case ErrorCode::ConstraintArityMismatch: return "ConstraintArityMismatch";
    case ErrorCode::SlabNonConvergence: return "SlabNonConvergence";
    case ErrorCode::DivergenceDetected: return "DivergenceDetected";
    case ErrorCode::MaxIterExceeded: return "MaxIterExceeded";
    case ErrorCode::InsufficientData: return "InsufficientData";
    case ErrorCode::OracleNonConvergence: return "OracleNonConvergence";
    case ErrorCode::TooManyUnknowns: return "TooManyUnknowns";
    case ErrorCode::ShapeMismatch: return "ShapeMismatch";
    case ErrorCode::UnknownProblem: return "UnknownProblem";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, const std::string& detail)
    : std::runtime_error(std::string(error_name(code)) + ": " + detail), code_(code) {}

}  // namespace pdefix
