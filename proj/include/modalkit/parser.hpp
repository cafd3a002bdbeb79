// modalkit :: parsing of TPTP-style problems (NXF, NHF, THF) and QMLTP
// legacy files

#ifndef MODALKIT_PARSER_HPP_
#define MODALKIT_PARSER_HPP_

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "modalkit/diagnostics.hpp"
#include "modalkit/syntax.hpp"

namespace modalkit {

enum class SourceDialect {
  Auto,         // accept tff and thf annotated formulae
  Nxf,          // tff only
  Nhf,          // thf only
  Thf,          // thf only (classical content expected downstream)
  QmltpLegacy,  // qmf only (converted by convert_qmltp)
};

struct ParseOptions {
  SourceDialect dialect = SourceDialect::Auto;
  // Root for include(...) resolution; empty means "directory of the
  // including file". The MODALKIT_INCLUDE_ROOT environment variable is used
  // as a fallback by the CLI, not by the library.
  std::string include_root;
  // Guard against pathological inputs.
  size_t max_bytes = 32ull << 20;
};

struct ParseResult {
  std::optional<Problem> problem;
  std::vector<ParseDiagnostic> diagnostics;

  bool ok() const { return problem.has_value(); }
  bool has_errors() const {
    for (const auto& d : diagnostics)
      if (d.severity == Severity::Error) return true;
    return false;
  }
  std::vector<ParseDiagnostic> warnings() const {
    std::vector<ParseDiagnostic> out;
    for (const auto& d : diagnostics)
      if (d.severity == Severity::Warning) out.push_back(d);
    return out;
  }
};

// Parses problem text. Never throws on malformed input: the result carries
// either a problem (possibly with warnings) or error diagnostics.
ParseResult parse_problem(std::string_view text, const ParseOptions& options = {});

// Reads and parses a file; include(...) directives are resolved relative to
// the include root (or the file's directory) with cycle detection.
ParseResult parse_file(const std::string& path, const ParseOptions& options = {});

// Parses a `$modal == [...]` specification given as text (the formula part
// of a logic annotated formula). Throws ToolError on malformed input.
LogicSpec parse_logic_annotation(std::string_view text);

// Converts a QMLTP qmf file to an NXF problem: #box/#dia become {$box}/{$dia}
// nodes, axiom roles gain the local subrole, quantified variables are typed
// $i, and the inferred signature is materialized as type declarations.
ParseResult convert_qmltp(std::string_view text, const ParseOptions& options = {});
ParseResult convert_qmltp_file(const std::string& path, const ParseOptions& options = {});

}  // namespace modalkit

#endif  // MODALKIT_PARSER_HPP_
