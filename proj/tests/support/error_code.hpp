#pragma once

#include <gtest/gtest.h>

#include "privcore/error.hpp"

namespace privcore::testing {

// Code of the privcore::Error thrown by fn; records a failure if none is thrown.
template <typename Fn>
ErrorCode code_of(Fn&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "expected privcore::Error";
  return static_cast<ErrorCode>(-1);
}

}  // namespace privcore::testing
