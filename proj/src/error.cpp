#include "occutime/error.hpp"

namespace occutime {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::InvalidInput: return "InvalidInput";
    case ErrorCode::NegativeOffDiagonal: return "NonNegativeOffDiagonalViolation";
    case ErrorCode::PositiveRowSum: return "PositiveRowSum";
    case ErrorCode::ZeroDiagonal: return "ZeroDiagonal";
    case ErrorCode::NonConservativeRow: return "NonConservativeRow";
    case ErrorCode::NotSkipFree: return "NotSkipFree";
    case ErrorCode::NotTridiagonal: return "NotTridiagonal";
    case ErrorCode::ZeroBackRate: return "ZeroBackRate";
    case ErrorCode::NoKillingReachable: return "NoKillingReachable";
    case ErrorCode::SingularMatrix: return "SingularMatrix";
    case ErrorCode::NotPositiveDefinite: return "NotPositiveDefinite";
    case ErrorCode::NonPositiveDeterminant: return "NonPositiveDeterminant";
    case ErrorCode::IndexOutOfRange: return "IndexOutOfRange";
    case ErrorCode::PathLengthExceeded: return "PathLengthExceeded";
    case ErrorCode::NotApplicable: return "NotApplicable";
    case ErrorCode::EliminationBreakdown: return "EliminationBreakdown";
    case ErrorCode::InternalConsistency: return "InternalConsistency";
    case ErrorCode::MalformedInput: return "MalformedInput";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, const std::string& message, std::size_t row, std::size_t col)
    : std::runtime_error(message), code_(code), row_(row), col_(col) {}

PathLengthExceeded::PathLengthExceeded(std::size_t completed_paths, std::size_t max_jumps)
    : Error(ErrorCode::PathLengthExceeded,
            "path exceeded " + std::to_string(max_jumps) + " jumps after " +
                std::to_string(completed_paths) + " completed paths"),
      completed_(completed_paths) {}

}  // namespace occutime
