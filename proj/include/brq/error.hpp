#pragma once

#include <stdexcept>
#include <string>

namespace brq {

enum class ErrorCode {
  InvalidDimension,
  InvalidSize,
  InvalidLength,
  InvalidArgument,
  OutOfRange,
  Singular,
  Divergent,
  Unresolvable,
  Io,
};

/// Every precondition failure in the library surfaces as an Error carrying a
/// machine-checkable code; the message is for humans.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace brq
