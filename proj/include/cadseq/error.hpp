#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace cadseq {

enum class ErrorCode {
  InvalidArgument,
  InvalidModel,
  OutOfRange,
  ParseFailed,
  EmptyGeometry,
  DegenerateExtent,
  EmptyCloud,
  EmptyEditSet,
  InvalidTarget,
  IndexOutOfBounds,
  StaleOldValue,
  InvalidResult,
  NonInvertible,
  NothingRemovable,
  ClientUnavailable,
  ClientTimeout,
  MalformedResponse,
};

std::string_view to_string(ErrorCode code);

// Domain failure raised by every module. The code is machine-readable; the
// message is for humans.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string &message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace cadseq
