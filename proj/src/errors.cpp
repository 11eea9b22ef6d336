#include "tsl/errors.hpp"

namespace tsl {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::DegenerateMatrix: return "DegenerateMatrix";
    case ErrorCode::RankDeficientTransmission: return "RankDeficientTransmission";
    case ErrorCode::RhoSignViolation: return "RhoSignViolation";
    case ErrorCode::PotentialUnbounded: return "PotentialUnbounded";
    case ErrorCode::StepFailure: return "StepFailure";
    case ErrorCode::NonFiniteState: return "NonFiniteState";
    case ErrorCode::SingularJump: return "SingularJump";
    case ErrorCode::NoConvergence: return "NoConvergence";
    case ErrorCode::CaseMismatch: return "CaseMismatch";
    case ErrorCode::SideMismatch: return "SideMismatch";
    case ErrorCode::LostBracket: return "LostBracket";
    case ErrorCode::TangencyRejected: return "TangencyRejected";
    case ErrorCode::IncompleteSpectrum: return "IncompleteSpectrum";
    case ErrorCode::NotAnEigenvalue: return "NotAnEigenvalue";
    case ErrorCode::MeshMismatch: return "MeshMismatch";
    case ErrorCode::DegenerateFit: return "DegenerateFit";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::UnknownKey: return "UnknownKey";
    case ErrorCode::ValidationError: return "ValidationError";
    case ErrorCode::IoError: return "IoError";
    case ErrorCode::InternalError: return "InternalError";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

}  // namespace tsl
