#include "rabi/errors.hpp"

namespace rabi {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::InvalidArgument: return "INVALID_ARGUMENT";
    case ErrorCode::CouplingOutOfRange: return "COUPLING_OUT_OF_RANGE";
    case ErrorCode::ZeroCoupling: return "ZERO_COUPLING";
    case ErrorCode::SectorMismatch: return "SECTOR_MISMATCH";
    case ErrorCode::PoleCollision: return "POLE_COLLISION";
    case ErrorCode::NotDecoupled: return "NOT_DECOUPLED";
    case ErrorCode::CoefficientPole: return "COEFFICIENT_POLE";
    case ErrorCode::DivisionBlowup: return "DIVISION_BLOWUP";
    case ErrorCode::EmptyWindow: return "EMPTY_WINDOW";
    case ErrorCode::SignLost: return "SIGN_LOST";
    case ErrorCode::NotAnEigenvalue: return "NOT_AN_EIGENVALUE";
    case ErrorCode::TruncationInsufficient: return "TRUNCATION_INSUFFICIENT";
    case ErrorCode::ConvergenceFailure: return "CONVERGENCE_FAILURE";
    case ErrorCode::TruncationCeiling: return "TRUNCATION_CEILING";
  }
  return "UNKNOWN";
}

}  // namespace rabi
