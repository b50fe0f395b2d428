#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace claimspot {

enum class ErrorCode {
  ParseError,
  DuplicateVote,
  UnknownCategoryCode,
  OverlappingSets,
  IncompleteCoverage,
  InsufficientData,
  NotFitted,
  DimensionMismatch,
  EmptyFile,
  DuplicateId,
  MissingVector,
  UnknownTag,
  InvalidArgument,
  SingleClassInput,
  HingeModelHasNoProbability,
  VersionMismatch,
  CorruptModelFile,
  ClassTooSmall,
  LengthMismatch,
  UnknownLabel,
  IoError,
  ConfigError,
  StoreUnavailable,
  SessionNotFound,
  ItemNotFound,
  ModelNotLoaded,
  DuplicateSession,
};

std::string_view error_code_name(ErrorCode code);

// Every failure surfaced by the library. `line` is set for errors that point
// into an input file (1-based).
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message,
        std::optional<std::size_t> line = std::nullopt);

  ErrorCode code() const noexcept { return code_; }
  std::optional<std::size_t> line() const noexcept { return line_; }

 private:
  ErrorCode code_;
  std::optional<std::size_t> line_;
};

}  // namespace claimspot
