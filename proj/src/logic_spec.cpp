#include "modalkit/logic_spec.hpp"

#include <array>
#include <utility>
#include <vector>

namespace modalkit {

const char* error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::ArityConflict: return "ArityConflict";
    case ErrorCode::SortConflict: return "SortConflict";
    case ErrorCode::UnknownSystem: return "UnknownSystem";
    case ErrorCode::UnsupportedLogicFamily: return "UnsupportedLogicFamily";
    case ErrorCode::MalformedProperty: return "MalformedProperty";
    case ErrorCode::UnsupportedFeature: return "UnsupportedFeature";
    case ErrorCode::UnhandledConnective: return "UnhandledConnective";
    case ErrorCode::StageMismatch: return "StageMismatch";
    case ErrorCode::MissingConjecture: return "MissingConjecture";
    case ErrorCode::UnassignedSymbol: return "UnassignedSymbol";
    case ErrorCode::BoundsTooLarge: return "BoundsTooLarge";
    case ErrorCode::UnsupportedFragment: return "UnsupportedFragment";
    case ErrorCode::TypeError: return "TypeError";
    case ErrorCode::Internal: return "Internal";
  }
  return "Unknown";
}

const char* domain_semantics_name(DomainSemantics d) {
  switch (d) {
    case DomainSemantics::Constant: return "$constant";
    case DomainSemantics::Cumulative: return "$cumulative";
    case DomainSemantics::Decreasing: return "$decreasing";
    case DomainSemantics::Varying: return "$varying";
  }
  return "?";
}

const char* designation_name(Designation d) {
  return d == Designation::Rigid ? "$rigid" : "$flexible";
}

const char* axiom_scheme_token(AxiomScheme s) {
  switch (s) {
    case AxiomScheme::K: return "$modal_axiom_K";
    case AxiomScheme::D: return "$modal_axiom_D";
    case AxiomScheme::T: return "$modal_axiom_T";
    case AxiomScheme::B: return "$modal_axiom_B";
    case AxiomScheme::Four: return "$modal_axiom_4";
    case AxiomScheme::Five: return "$modal_axiom_5";
  }
  return "?";
}

const char* frame_condition_name(FrameCondition c) {
  switch (c) {
    case FrameCondition::Serial: return "serial";
    case FrameCondition::Reflexive: return "reflexive";
    case FrameCondition::Symmetric: return "symmetric";
    case FrameCondition::Transitive: return "transitive";
    case FrameCondition::Euclidean: return "euclidean";
    case FrameCondition::Universal: return "universal";
  }
  return "?";
}

namespace {

using SystemEntry = std::pair<const char*, SchemeSet>;

// Built-in system names of the modal cube; any other system is expressible
// as a list of $modal_axiom_* tokens.
const std::vector<SystemEntry>& system_table() {
  static const std::vector<SystemEntry> table = {
      {"K", {AxiomScheme::K}},
      {"D", {AxiomScheme::K, AxiomScheme::D}},
      {"M", {AxiomScheme::K, AxiomScheme::T}},
      {"T", {AxiomScheme::K, AxiomScheme::T}},
      {"K4", {AxiomScheme::K, AxiomScheme::Four}},
      {"D4", {AxiomScheme::K, AxiomScheme::D, AxiomScheme::Four}},
      {"B", {AxiomScheme::K, AxiomScheme::T, AxiomScheme::B}},
      {"S4", {AxiomScheme::K, AxiomScheme::T, AxiomScheme::Four}},
      {"S5", {AxiomScheme::K, AxiomScheme::T, AxiomScheme::Five}},
  };
  return table;
}

bool axiom_for_token(const std::string& name, AxiomScheme& out) {
  if (name == "K") { out = AxiomScheme::K; return true; }
  if (name == "D") { out = AxiomScheme::D; return true; }
  if (name == "T" || name == "M") { out = AxiomScheme::T; return true; }
  if (name == "B") { out = AxiomScheme::B; return true; }
  if (name == "4") { out = AxiomScheme::Four; return true; }
  if (name == "5") { out = AxiomScheme::Five; return true; }
  return false;
}

}  // namespace

SchemeSet expand_system(const std::string& token) {
  const std::string sys_prefix = "$modal_system_";
  const std::string ax_prefix = "$modal_axiom_";
  if (token.rfind(sys_prefix, 0) == 0) {
    std::string name = token.substr(sys_prefix.size());
    for (const auto& [sys, schemes] : system_table())
      if (name == sys) return schemes;
    throw ToolError(ErrorCode::UnknownSystem, "unrecognized modal system '" + token + "'");
  }
  if (token.rfind(ax_prefix, 0) == 0) {
    AxiomScheme s;
    if (axiom_for_token(token.substr(ax_prefix.size()), s))
      return SchemeSet{AxiomScheme::K, s};
    throw ToolError(ErrorCode::UnknownSystem, "unrecognized modal axiom '" + token + "'");
  }
  // Bare names ("S5") are accepted for CLI convenience.
  for (const auto& [sys, schemes] : system_table())
    if (token == sys) return schemes;
  throw ToolError(ErrorCode::UnknownSystem, "unrecognized modal system '" + token + "'");
}

const char* system_token_for(const SchemeSet& schemes) {
  static std::map<std::string, std::string> tokens;  // name -> full token
  for (const auto& [sys, expansion] : system_table()) {
    if (expansion == schemes) {
      auto& tok = tokens[sys];
      if (tok.empty()) tok = std::string("$modal_system_") + sys;
      return tok.c_str();
    }
  }
  return nullptr;
}

std::set<FrameCondition> frame_conditions(const SchemeSet& schemes) {
  std::set<FrameCondition> out;
  for (AxiomScheme s : schemes) {
    switch (s) {
      case AxiomScheme::K: break;
      case AxiomScheme::D: out.insert(FrameCondition::Serial); break;
      case AxiomScheme::T: out.insert(FrameCondition::Reflexive); break;
      case AxiomScheme::B: out.insert(FrameCondition::Symmetric); break;
      case AxiomScheme::Four: out.insert(FrameCondition::Transitive); break;
      case AxiomScheme::Five: out.insert(FrameCondition::Euclidean); break;
    }
  }
  return out;
}

bool schemes_entail_equivalence(const SchemeSet& s) {
  auto has = [&](AxiomScheme a) { return s.count(a) > 0; };
  // Combinations whose frame conditions force an equivalence relation:
  //   T5 (the S5 expansion), TB4, DB4 and DB5 all do.
  if (has(AxiomScheme::T) && has(AxiomScheme::Five)) return true;
  if (has(AxiomScheme::T) && has(AxiomScheme::B) && has(AxiomScheme::Four)) return true;
  if (has(AxiomScheme::D) && has(AxiomScheme::B) && has(AxiomScheme::Four)) return true;
  if (has(AxiomScheme::D) && has(AxiomScheme::B) && has(AxiomScheme::Five)) return true;
  return false;
}

LogicSpec make_logic_spec(const std::string& system, DomainSemantics domains,
                          Designation designation) {
  LogicSpec spec;
  spec.default_domains = domains;
  spec.designation = designation;
  spec.modalities.default_schemes = expand_system(system);
  return spec;
}

}  // namespace modalkit
