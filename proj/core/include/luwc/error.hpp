#pragma once

#include <stdexcept>
#include <string>

namespace luwc {

enum class ErrorCode {
  DimensionMismatch,
  InvalidArgument,
  NotProbability,
  LimitExceeded,
  Monotonicity,
  Structure,
  GridMismatch,
  BranchTracking,
  Schema,
  UnknownName,
};

const char* to_string(ErrorCode code) noexcept;

/// Every precondition or invariant violation in the library surfaces as this type.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

inline void require(bool ok, ErrorCode code, const std::string& what) {
  if (!ok) throw Error(code, what);
}

}  // namespace luwc
