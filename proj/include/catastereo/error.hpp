#pragma once

#include <stdexcept>
#include <string>

namespace catastereo {

enum class ErrorCode {
  InvalidMirror,
  DegenerateRig,
  BehindCamera,
  OutOfMirror,
  MirrorOccludesCamera,
  DivergingViews,
  InvalidConfig,
  InsufficientData,
  DegenerateGeometry,
  IllConditioned,
  NearParallelRays,
  Cheirality,
  EmptySkeleton,
  ParseError,
  IoError,
};

const char* error_code_name(ErrorCode code);

/// Single exception type carrying a machine-checkable code plus a message.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(error_code_name(code)) + ": " + what), code_(code) {}

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace catastereo
