#include "peereval/errors.hpp"

namespace peereval {

ErrorCategory category_of(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::ZeroColumn:
    case ErrorCode::TeamTooSmall:
    case ErrorCode::NoInformedJudges:
    case ErrorCode::NoValidColumns:
    case ErrorCode::NoComparableEntries:
      return ErrorCategory::Mechanism;
    case ErrorCode::IoFailure:
      return ErrorCategory::Io;
    default:
      return ErrorCategory::Validation;
  }
}

std::string_view name_of(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::NegativeEntry: return "NegativeEntry";
    case ErrorCode::NonzeroDiagonal: return "NonzeroDiagonal";
    case ErrorCode::TooSmall: return "TooSmall";
    case ErrorCode::AllMissing: return "AllMissing";
    case ErrorCode::DegenerateTruth: return "DegenerateTruth";
    case ErrorCode::LengthMismatch: return "LengthMismatch";
    case ErrorCode::InvalidIndex: return "InvalidIndex";
    case ErrorCode::ResolutionTooCoarse: return "ResolutionTooCoarse";
    case ErrorCode::InvalidValue: return "InvalidValue";
    case ErrorCode::ZeroColumn: return "ZeroColumn";
    case ErrorCode::TeamTooSmall: return "TeamTooSmall";
    case ErrorCode::NoInformedJudges: return "NoInformedJudges";
    case ErrorCode::NoValidColumns: return "NoValidColumns";
    case ErrorCode::NoComparableEntries: return "NoComparableEntries";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::UnknownStudent: return "UnknownStudent";
    case ErrorCode::DuplicateCell: return "DuplicateCell";
    case ErrorCode::NegativeScore: return "NegativeScore";
    case ErrorCode::IoFailure: return "IoFailure";
  }
  return "Unknown";
}

}  // namespace peereval
