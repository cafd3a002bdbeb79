// modalkit :: diagnostics and error codes shared across the toolchain

#ifndef MODALKIT_DIAGNOSTICS_HPP_
#define MODALKIT_DIAGNOSTICS_HPP_

#include <stdexcept>
#include <string>
#include <vector>

namespace modalkit {

enum class Severity { Error, Warning };

// A located message produced while reading input. Errors always carry a
// usable line/column; warnings may use 0/0 when no position applies.
struct ParseDiagnostic {
  Severity severity = Severity::Error;
  int line = 0;
  int column = 0;
  std::string message;

  std::string render() const {
    std::string s = severity == Severity::Error ? "error" : "warning";
    if (line > 0) s += " at " + std::to_string(line) + ":" + std::to_string(column);
    return s + ": " + message;
  }
};

enum class ErrorCode {
  ArityConflict,
  SortConflict,
  UnknownSystem,
  UnsupportedLogicFamily,
  MalformedProperty,
  UnsupportedFeature,
  UnhandledConnective,
  StageMismatch,
  MissingConjecture,
  UnassignedSymbol,
  BoundsTooLarge,
  UnsupportedFragment,
  TypeError,
  Internal,
};

const char* error_code_name(ErrorCode code);

// Exceptions carry a code so callers (CLI, tests) can map them to exit codes
// without string matching.
class ToolError : public std::runtime_error {
 public:
  ToolError(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(error_code_name(code)) + ": " + message), code_(code) {}

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace modalkit

#endif  // MODALKIT_DIAGNOSTICS_HPP_
