#include "votecast/error.hpp"

namespace votecast {

const char* errc_name(Errc code) {
  switch (code) {
    case Errc::FewerThanTwoPoints: return "FewerThanTwoPoints";
    case Errc::NonMonotoneDates: return "NonMonotoneDates";
    case Errc::WindowLargerThanSeries: return "WindowLargerThanSeries";
    case Errc::SeriesTooShort: return "SeriesTooShort";
    case Errc::MalformedRow: return "MalformedRow";
    case Errc::InvalidPlatformFeaturePair: return "InvalidPlatformFeaturePair";
    case Errc::NegativeCount: return "NegativeCount";
    case Errc::DuplicateCell: return "DuplicateCell";
    case Errc::ShareOutOfRange: return "ShareOutOfRange";
    case Errc::SumExceeds100: return "SumExceeds100";
    case Errc::UnknownSubject: return "UnknownSubject";
    case Errc::InsufficientOverlap: return "InsufficientOverlap";
    case Errc::EmptyDataset: return "EmptyDataset";
    case Errc::NonFiniteInput: return "NonFiniteInput";
    case Errc::DimensionMismatch: return "DimensionMismatch";
    case Errc::TooFewObservations: return "TooFewObservations";
    case Errc::InconsistentInitials: return "InconsistentInitials";
    case Errc::ExogenousWidthMismatch: return "ExogenousWidthMismatch";
    case Errc::LengthMismatch: return "LengthMismatch";
    case Errc::EmptyInput: return "EmptyInput";
    case Errc::DatasetTooSmall: return "DatasetTooSmall";
    case Errc::AllUndecided: return "AllUndecided";
    case Errc::UnknownSource: return "UnknownSource";
    case Errc::UnknownTarget: return "UnknownTarget";
    case Errc::DuplicateSubjects: return "DuplicateSubjects";
    case Errc::InfeasibleTarget: return "InfeasibleTarget";
    case Errc::ConfigError: return "ConfigError";
    case Errc::UnknownCommand: return "UnknownCommand";
  }
  return "UnknownError";
}

Error::Error(Errc code, const std::string& msg)
    : std::runtime_error(std::string(errc_name(code)) + ": " + msg), code_(code) {}

void raise(Errc code, const std::string& msg) { throw Error(code, msg); }

}  // namespace votecast
