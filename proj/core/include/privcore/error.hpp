#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace privcore {

enum class ErrorCode {
  kInvalidArgument,
  kUnderdetermined,
  kUndefined,
  kInfeasible,
  kParse,
  kIo,
};

std::string_view to_string(ErrorCode code);

// Single exception type for the library; callers switch on code().
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

// Carries the closest gap reached when a constrained selection fails.
class InfeasibleError : public Error {
 public:
  InfeasibleError(const std::string& message, double best_gap)
      : Error(ErrorCode::kInfeasible, message), best_gap_(best_gap) {}

  double best_gap() const noexcept { return best_gap_; }

 private:
  double best_gap_;
};

[[noreturn]] inline void throw_invalid(const std::string& message) {
  throw Error(ErrorCode::kInvalidArgument, message);
}

}  // namespace privcore
