// modalkit :: $modal logic specifications and their frame-condition semantics

#ifndef MODALKIT_LOGIC_SPEC_HPP_
#define MODALKIT_LOGIC_SPEC_HPP_

#include <map>
#include <set>
#include <string>

#include "modalkit/diagnostics.hpp"

namespace modalkit {

enum class DomainSemantics { Constant, Cumulative, Decreasing, Varying };
enum class Designation { Rigid, Flexible };

// Scheme K is implicit in every normal modality; expand_system always
// includes it.
enum class AxiomScheme { K, D, T, B, Four, Five };

using SchemeSet = std::set<AxiomScheme>;

enum class FrameCondition { Serial, Reflexive, Symmetric, Transitive, Euclidean, Universal };

const char* domain_semantics_name(DomainSemantics d);   // "$constant" etc.
const char* designation_name(Designation d);            // "$rigid" / "$flexible"
const char* axiom_scheme_token(AxiomScheme s);          // "$modal_axiom_K" etc.
const char* frame_condition_name(FrameCondition c);

// Expands "$modal_system_*" and "$modal_axiom_*" tokens to scheme sets.
// Throws ToolError(UnknownSystem) for unrecognized tokens.
SchemeSet expand_system(const std::string& token);

// Reverse lookup used by the printer: the canonical system token whose
// expansion equals the set, if any.
const char* system_token_for(const SchemeSet& schemes);

// Relation properties characterizing each scheme: K -> none, D -> serial,
// T -> reflexive, B -> symmetric, 4 -> transitive, 5 -> euclidean.
std::set<FrameCondition> frame_conditions(const SchemeSet& schemes);

// True when the scheme set forces an equivalence accessibility relation,
// i.e. the modality is (at least) S5. Used to gate the universal-relation
// rewrite and the domain collapse.
bool schemes_entail_equivalence(const SchemeSet& schemes);

struct ModalitySpec {
  SchemeSet default_schemes;
  std::map<std::string, SchemeSet> per_index;

  const SchemeSet& schemes_for(const std::string& index) const {
    auto it = per_index.find(index);
    return it == per_index.end() ? default_schemes : it->second;
  }
  bool operator==(const ModalitySpec&) const = default;
};

// A fully resolved $modal specification. Consequence is local throughout
// (premise locality is carried by formula subroles, not by the spec).
struct LogicSpec {
  DomainSemantics default_domains = DomainSemantics::Constant;
  std::map<std::string, DomainSemantics> domain_overrides;  // per user type
  Designation designation = Designation::Rigid;
  ModalitySpec modalities;

  DomainSemantics domains_for(const std::string& type_name) const {
    auto it = domain_overrides.find(type_name);
    return it == domain_overrides.end() ? default_domains : it->second;
  }
  bool operator==(const LogicSpec&) const = default;
};

// Convenience constructor used by tests and CLI overrides: a mono-modal spec
// from a system token ("S5", "$modal_system_S5", ...).
LogicSpec make_logic_spec(const std::string& system, DomainSemantics domains,
                          Designation designation = Designation::Rigid);

}  // namespace modalkit

#endif  // MODALKIT_LOGIC_SPEC_HPP_
