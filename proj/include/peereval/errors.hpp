#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace peereval {

enum class ErrorCode {
  // input / precondition violations
  NegativeEntry,
  NonzeroDiagonal,
  TooSmall,
  AllMissing,
  DegenerateTruth,
  LengthMismatch,
  InvalidIndex,
  ResolutionTooCoarse,
  InvalidValue,
  // mechanism failures on otherwise well-formed input
  ZeroColumn,
  TeamTooSmall,
  NoInformedJudges,
  NoValidColumns,
  NoComparableEntries,
  // file interface
  ParseError,
  UnknownStudent,
  DuplicateCell,
  NegativeScore,
  IoFailure,
};

// Exit-code groups used by the CLI: validation 1, mechanism 2, I/O 3.
enum class ErrorCategory { Validation = 1, Mechanism = 2, Io = 3 };

ErrorCategory category_of(ErrorCode code) noexcept;
std::string_view name_of(ErrorCode code) noexcept;

class PeerEvalError : public std::runtime_error {
 public:
  PeerEvalError(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }
  ErrorCategory category() const noexcept { return category_of(code_); }

 private:
  ErrorCode code_;
};

}  // namespace peereval
