#include "evpix/error.hpp"

namespace evpix {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::NonPositiveCurrent: return "NonPositiveCurrent";
    case ErrorCode::DegenerateThreshold: return "DegenerateThreshold";
    case ErrorCode::TweakOutOfRange: return "TweakOutOfRange";
    case ErrorCode::PixelInoperative: return "PixelInoperative";
    case ErrorCode::SamplingTooCoarse: return "SamplingTooCoarse";
    case ErrorCode::OutOfBounds: return "OutOfBounds";
    case ErrorCode::InvalidGeometry: return "InvalidGeometry";
    case ErrorCode::BadFrameFormat: return "BadFrameFormat";
    case ErrorCode::InconsistentDimensions: return "InconsistentDimensions";
    case ErrorCode::ConfigMismatch: return "ConfigMismatch";
    case ErrorCode::IncompleteMapping: return "IncompleteMapping";
    case ErrorCode::InvalidConfig: return "InvalidConfig";
    case ErrorCode::IoError: return "IoError";
  }
  return "Unknown";
}

}  // namespace evpix
