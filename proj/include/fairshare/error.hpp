#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace fairshare {

enum class ErrorCode {
  NonConvexInput,
  DisagreementOutside,
  DegenerateSet,
  DegenerateNormalization,
  NotNormalized,
  UnknownPreset,
  InvalidP,
  NoConvergence,
  DiskOutsideDomain,
  DiskOutsideFeasible,
  MaxMovesExceeded,
  StartNotInterior,
  UnknownVariant,
  UnknownSolver,
  MalformedInstance,
  InvalidArgument,
  InvalidProblemFile,
};

constexpr std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::NonConvexInput: return "NonConvexInput";
    case ErrorCode::DisagreementOutside: return "DisagreementOutside";
    case ErrorCode::DegenerateSet: return "DegenerateSet";
    case ErrorCode::DegenerateNormalization: return "DegenerateNormalization";
    case ErrorCode::NotNormalized: return "NotNormalized";
    case ErrorCode::UnknownPreset: return "UnknownPreset";
    case ErrorCode::InvalidP: return "InvalidP";
    case ErrorCode::NoConvergence: return "NoConvergence";
    case ErrorCode::DiskOutsideDomain: return "DiskOutsideDomain";
    case ErrorCode::DiskOutsideFeasible: return "DiskOutsideFeasible";
    case ErrorCode::MaxMovesExceeded: return "MaxMovesExceeded";
    case ErrorCode::StartNotInterior: return "StartNotInterior";
    case ErrorCode::UnknownVariant: return "UnknownVariant";
    case ErrorCode::UnknownSolver: return "UnknownSolver";
    case ErrorCode::MalformedInstance: return "MalformedInstance";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::InvalidProblemFile: return "InvalidProblemFile";
  }
  return "Unknown";
}

/// Every failure in the library is reported as an Error carrying a code, so
/// callers (the CLI in particular) can map failures to exit statuses.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace fairshare
