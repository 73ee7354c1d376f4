#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace evpix {

enum class ErrorCode {
  NonPositiveCurrent,
  DegenerateThreshold,
  TweakOutOfRange,
  PixelInoperative,
  SamplingTooCoarse,
  OutOfBounds,
  InvalidGeometry,
  BadFrameFormat,
  InconsistentDimensions,
  ConfigMismatch,
  IncompleteMapping,
  InvalidConfig,
  IoError,
};

std::string_view to_string(ErrorCode code);

// All library failures are reported through this type; `code()` is stable and
// is what the CLI prints in its machine-readable error line.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace evpix
