#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace vppfreq {

enum class ErrorCode {
  InvalidInput,
  Overdamped,
  NeverActivates,
  NonFinite,
  DeadbandExceedsLimit,
  Unsatisfiable,
  Infeasible,
  EmptyFront,
  MissingCompensation,
};

std::string_view to_string(ErrorCode code) noexcept;

/// Single exception type for every failure raised by the library. The code
/// identifies the failure class; the message carries the offending values.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace vppfreq
