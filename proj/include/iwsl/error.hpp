#pragma once

#include <stdexcept>
#include <string>

namespace iwsl {

enum class ErrorCode {
  kInvalidArgument,
  kDimensionMismatch,
  kGridMismatch,
  kOutOfBounds,
  kParse,
  kIo,
  kSingularSystem,
  kSingularNormalEquations,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

  // True for failures of the numerics rather than of the inputs.
  bool numerical() const noexcept {
    return code_ == ErrorCode::kSingularSystem ||
           code_ == ErrorCode::kSingularNormalEquations ||
           code_ == ErrorCode::kOutOfBounds;
  }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) {
  throw Error(code, what);
}

}  // namespace iwsl
