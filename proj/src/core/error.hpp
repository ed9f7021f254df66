#pragma once

#include <stdexcept>
#include <string>

namespace logikon {

enum class ErrorCode {
  syntax,
  arity_mismatch,
  undeclared_connective,
  duplicate_name,
  invalid_argument,
  out_of_range,
  non_finite,
  budget_exceeded,
  unsupported,
  stale_tape,
  layout_mismatch,
  precondition,
  retraction_failure,
  io,
};

const char* to_string(ErrorCode code) noexcept;

struct SourceLocation {
  std::size_t line = 0;
  std::size_t column = 0;
};

// Every failure raised by the core carries a code so the C boundary can map it
// onto a status without string matching.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}
  Error(ErrorCode code, SourceLocation where, const std::string& what)
      : std::runtime_error(std::to_string(where.line) + ":" +
                           std::to_string(where.column) + ": " + what),
        code_(code),
        location_(where),
        has_location_(true) {}

  ErrorCode code() const noexcept { return code_; }
  bool has_location() const noexcept { return has_location_; }
  SourceLocation location() const noexcept { return location_; }

 private:
  ErrorCode code_;
  SourceLocation location_{};
  bool has_location_ = false;
};

}  // namespace logikon
