#pragma once

#include <stdexcept>
#include <string>

namespace votecast {

enum class Errc {
  // series
  FewerThanTwoPoints,
  NonMonotoneDates,
  WindowLargerThanSeries,
  SeriesTooShort,
  // ingest
  MalformedRow,
  InvalidPlatformFeaturePair,
  NegativeCount,
  DuplicateCell,
  ShareOutOfRange,
  SumExceeds100,
  UnknownSubject,
  InsufficientOverlap,
  // regressors
  EmptyDataset,
  NonFiniteInput,
  DimensionMismatch,
  // arimax
  TooFewObservations,
  InconsistentInitials,
  ExogenousWidthMismatch,
  // evaluate
  LengthMismatch,
  EmptyInput,
  DatasetTooSmall,
  // scenario
  AllUndecided,
  UnknownSource,
  UnknownTarget,
  DuplicateSubjects,
  // synth
  InfeasibleTarget,
  // cli
  ConfigError,
  UnknownCommand,
};

const char* errc_name(Errc code);

/// Single exception type carrying a machine-checkable error code.
class Error : public std::runtime_error {
public:
  Error(Errc code, const std::string& msg);
  Errc code() const noexcept { return code_; }

private:
  Errc code_;
};

[[noreturn]] void raise(Errc code, const std::string& msg);

}  // namespace votecast
