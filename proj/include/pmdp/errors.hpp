#pragma once

#include <stdexcept>
#include <string>

namespace pmdp {

// Domain-level failure with a stable machine-readable code. The CLI maps these
// to exit code 1 and prints {code, message} as JSON. Codes in use:
//   Unrealizable, NotEC, NotGEC, NotSGEC, NotSafety, NotWinning,
//   AlphabetMismatch, InvalidArena, InvalidRestriction, InvalidSchedule,
//   TooManySignals, UnknownState, UnknownAction
class DomainError : public std::runtime_error {
public:
  DomainError(std::string code, const std::string& message)
      : std::runtime_error(code + ": " + message), code_(std::move(code)) {}
  const std::string& code() const { return code_; }

private:
  std::string code_;
};

// Malformed input: JSON shape, fraction syntax, CLI misuse. Exit code 2.
class ParseError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// Broken internal invariant. Never expected on any input; indicates a bug.
class InternalError : public std::logic_error {
public:
  using std::logic_error::logic_error;
};

}  // namespace pmdp
