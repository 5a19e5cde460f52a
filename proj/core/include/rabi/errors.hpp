#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace rabi {

enum class ErrorCode {
  InvalidArgument,
  CouplingOutOfRange,
  ZeroCoupling,
  SectorMismatch,
  PoleCollision,
  NotDecoupled,
  CoefficientPole,
  DivisionBlowup,
  EmptyWindow,
  SignLost,
  NotAnEigenvalue,
  TruncationInsufficient,
  ConvergenceFailure,
  TruncationCeiling,
};

/// Stable upper-snake identifier, e.g. "COUPLING_OUT_OF_RANGE".
std::string_view to_string(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace rabi
