#include "dmdroi/error.hpp"

namespace dmdroi {

const char* to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::NotFound: return "NotFound";
    case ErrorCode::FormatError: return "FormatError";
    case ErrorCode::WriteError: return "WriteError";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::TooFewFrames: return "TooFewFrames";
    case ErrorCode::DegenerateInput: return "DegenerateInput";
    case ErrorCode::NumericalFailure: return "NumericalFailure";
    case ErrorCode::BadModeIndex: return "BadModeIndex";
    case ErrorCode::NoBlobFound: return "NoBlobFound";
    case ErrorCode::KernelTooLarge: return "KernelTooLarge";
    case ErrorCode::InvalidGeometry: return "InvalidGeometry";
    case ErrorCode::EmptyRoi: return "EmptyRoi";
    case ErrorCode::NormalizationMismatch: return "NormalizationMismatch";
  }
  return "Unknown";
}

}  // namespace dmdroi
