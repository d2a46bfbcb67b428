#pragma once

#include <doctest.h>

#include "softsrocc/errors.hpp"

namespace softsrocc::testing {

/// Runs fn and returns the code of the softsrocc::Error it throws.
template <typename Fn>
ErrorCode code_of(Fn&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected softsrocc::Error");
  return ErrorCode::InvalidArgument;
}

}  // namespace softsrocc::testing
