#pragma once

#include <stdexcept>
#include <string>

namespace dmdroi {

enum class ErrorCode {
  InvalidArgument,
  NotFound,
  FormatError,
  WriteError,
  DimensionMismatch,
  TooFewFrames,
  DegenerateInput,
  NumericalFailure,
  BadModeIndex,
  NoBlobFound,
  KernelTooLarge,
  InvalidGeometry,
  EmptyRoi,
  NormalizationMismatch,
};

const char* to_string(ErrorCode code) noexcept;

/// Single exception type for the library; callers dispatch on code().
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace dmdroi
