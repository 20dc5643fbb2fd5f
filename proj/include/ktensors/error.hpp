#pragma once

#include <stdexcept>
#include <string>

namespace kt {

enum class ErrorCode {
  kNotSquare = 1,
  kNotPsd,
  kNotOrthonormal,
  kNegativeValue,
  kDimMismatch,
  kConvergenceFailure,
  kEmptyFrameSet,
  kEmptySample,
  kSingularMatrix,
  kSingularAfterRidge,
  kTooFewObservations,
  kInvalidConfig,
  kLengthMismatch,
  kEmptyRecords,
  kInternal,
  kIo,
  kParse,
};

const char* error_code_name(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace kt
