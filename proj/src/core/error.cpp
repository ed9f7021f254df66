#include "core/error.hpp"

namespace logikon {

const char* to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::syntax: return "syntax error";
    case ErrorCode::arity_mismatch: return "arity mismatch";
    case ErrorCode::undeclared_connective: return "undeclared connective";
    case ErrorCode::duplicate_name: return "duplicate name";
    case ErrorCode::invalid_argument: return "invalid argument";
    case ErrorCode::out_of_range: return "index out of range";
    case ErrorCode::non_finite: return "non-finite value";
    case ErrorCode::budget_exceeded: return "resource budget exceeded";
    case ErrorCode::unsupported: return "unsupported operation";
    case ErrorCode::stale_tape: return "stale or mismatched tape";
    case ErrorCode::layout_mismatch: return "parameter layout mismatch";
    case ErrorCode::precondition: return "precondition violated";
    case ErrorCode::retraction_failure: return "retraction failure";
    case ErrorCode::io: return "i/o error";
  }
  return "unknown error";
}

}  // namespace logikon
