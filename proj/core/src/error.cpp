#include "privcore/error.hpp"

namespace privcore {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument: return "invalid-argument";
    case ErrorCode::kUnderdetermined: return "underdetermined";
    case ErrorCode::kUndefined: return "undefined";
    case ErrorCode::kInfeasible: return "infeasible";
    case ErrorCode::kParse: return "parse-error";
    case ErrorCode::kIo: return "io-error";
  }
  return "unknown";
}

}  // namespace privcore
