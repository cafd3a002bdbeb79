// modalkit :: shallow embedding of modal problems into classical
// higher-order logic

#ifndef MODALKIT_EMBEDDING_HPP_
#define MODALKIT_EMBEDDING_HPP_

#include <map>
#include <set>
#include <string>
#include <vector>

#include "modalkit/logic_spec.hpp"
#include "modalkit/syntax.hpp"

namespace modalkit {

struct EmbedOptions {
  bool s5u = false;         // universal accessibility relation rewrite
  bool s5_collapse = false; // cumulative/decreasing -> constant domains
  bool defs = false;        // named connective definitions instead of inlining
};

// Resolved translation parameters. All generated names carry the reserved
// emb__ prefix and are fresh with respect to the input signature.
struct EmbeddingPlan {
  std::string world_type;     // the type of possible worlds
  std::string lifted_bool;    // documentation name for world_type > $o
  std::string current_world;  // distinguished world for local consequence

  std::vector<std::string> indices;                 // "" = unindexed modality
  std::map<std::string, std::string> rel_names;     // index -> relation symbol
  std::vector<std::string> eiw_types;               // types needing an eiw guard
  std::map<std::string, std::string> eiw_names;     // type -> eiw symbol
  std::map<std::string, std::set<FrameCondition>> frame_axioms;  // per index
  std::map<std::string, DomainSemantics> domain_plan;            // per type, post collapse

  bool s5u = false;
  bool s5_domain_collapse = false;
  bool defs = false;

  DomainSemantics domains_for(const std::string& type_name) const {
    auto it = domain_plan.find(type_name);
    return it == domain_plan.end() ? DomainSemantics::Constant : it->second;
  }
};

// Computes the plan for a problem under a validated spec. Throws
// ToolError(UnsupportedFeature) for flexible designation. The optimization
// flags only take effect when every modality of the problem is (at least)
// S5; the domain collapse additionally requires cumulative or decreasing
// domains somewhere.
EmbeddingPlan plan(const Problem& problem, const LogicSpec& spec, const EmbedOptions& options = {});

// Lifts $o to world > $o everywhere in a type.
Type lift_type(const Type& t, const EmbeddingPlan& plan);

// The lifted form of a source formula: a predicate on worlds. In inline
// mode this is ^ [W: world]: <formula at W>; with defs it is a term built
// from the named connectives. Throws ToolError(UnhandledConnective) for
// non-modal {$...} connectives and UnsupportedFeature for higher-order
// source constructs.
Expr embed_formula(const Expr& f, const EmbeddingPlan& plan, const Signature& signature);

// The embedded formula evaluated at a given world expression; beta-normal
// by construction. Used for premises/conjectures and by the oracle.
Expr embed_formula_at(const Expr& f, const EmbeddingPlan& plan, const Signature& signature,
                      const Expr& world);

std::vector<AnnotatedFormula> emit_frame_axioms(const EmbeddingPlan& plan);
std::vector<AnnotatedFormula> emit_domain_axioms(const EmbeddingPlan& plan, const Problem& problem);

// Full translation: declarations, frame and domain axioms, lifted premises
// (global premises hold at all worlds, local ones at the current world) and
// the conjecture at the current world. Throws MissingConjecture when the
// problem has no conjecture.
Problem embed_problem(const Problem& problem, const LogicSpec& spec,
                      const EmbedOptions& options = {});

}  // namespace modalkit

#endif  // MODALKIT_EMBEDDING_HPP_
