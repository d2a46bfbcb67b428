#pragma once

#include <stdexcept>
#include <string>

namespace softsrocc {

enum class ErrorCode {
  LengthMismatch,
  NonFinite,
  DegenerateVariance,
  InvalidConfig,
  InvalidArgument,
  LabelConflict,
  ParseError,
  DivergenceDetected,
};

const char* to_string(ErrorCode code) noexcept;

// Single exception type for the library; callers switch on code().
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace softsrocc
