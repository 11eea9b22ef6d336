#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace tsl {

enum class ErrorCode {
  DegenerateMatrix,
  RankDeficientTransmission,
  RhoSignViolation,
  PotentialUnbounded,
  StepFailure,
  NonFiniteState,
  SingularJump,
  NoConvergence,
  CaseMismatch,
  SideMismatch,
  LostBracket,
  TangencyRejected,
  IncompleteSpectrum,
  NotAnEigenvalue,
  MeshMismatch,
  DegenerateFit,
  ParseError,
  UnknownKey,
  ValidationError,
  IoError,
  InternalError,
};

std::string_view to_string(ErrorCode code);

/// Every failure raised by the library carries one of the codes above so that
/// the CLI can emit machine-readable failure records.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message);

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace tsl
