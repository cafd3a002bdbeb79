// modalkit :: file-level pipeline steps shared by the CLI and tests

#ifndef MODALKIT_PIPELINE_HPP_
#define MODALKIT_PIPELINE_HPP_

#include <optional>
#include <string>
#include <vector>

#include "modalkit/embedding.hpp"
#include "modalkit/parser.hpp"

namespace modalkit {

struct TranslateOverrides {
  std::optional<std::string> system;
  std::optional<DomainSemantics> domains;
  std::optional<Designation> designation;
};

// Resolves the effective logic specification: the in-file spec (when
// present) with flag overrides applied. Throws UnsupportedFeature when no
// spec can be assembled.
LogicSpec resolve_spec(const Problem& problem, const TranslateOverrides& overrides);

// Translates a parsed problem to THF text. A note comment precedes the
// output when per-type domain constraints interact with multiple
// accessibility relations.
std::string translate_to_text(const Problem& problem, const LogicSpec& spec,
                              const EmbedOptions& options);

// The default 5x4 specification matrix (K, D, M, S4, S5 x constant,
// cumulative, decreasing, varying).
std::vector<std::string> default_systems();
std::vector<DomainSemantics> default_domains();

struct InjectResult {
  std::vector<std::string> written;  // output paths, in deterministic order
};

// Writes one spec-injected variant per (input, system, domains) combination
// into output_dir, named <base>.<system>.<domains>.p. Inputs must be NXF
// problems without a logic specification (UnsupportedFeature otherwise).
InjectResult inject_specs(const std::vector<std::string>& input_files,
                          const std::string& output_dir,
                          const std::vector<std::string>& systems,
                          const std::vector<DomainSemantics>& domains,
                          const ParseOptions& parse_options = {});

}  // namespace modalkit

#endif  // MODALKIT_PIPELINE_HPP_
