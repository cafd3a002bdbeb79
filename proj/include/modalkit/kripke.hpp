// modalkit :: bounded brute-force Kripke semantics oracle

#ifndef MODALKIT_KRIPKE_HPP_
#define MODALKIT_KRIPKE_HPP_

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "modalkit/embedding.hpp"
#include "modalkit/logic_spec.hpp"
#include "modalkit/syntax.hpp"

namespace modalkit {

// ---------------------------------------------------------------------------
// Finite Kripke models

// Worlds and carrier elements are 0-based indices. Predicates are
// world-dependent, constants and functions rigid.
struct KripkeModel {
  int worlds = 1;
  int carrier = 1;
  // index -> row-major worlds x worlds adjacency matrix
  std::map<std::string, std::vector<uint8_t>> relations;
  // worlds x carrier membership (D_w as bitmap rows); every row nonempty
  std::vector<uint8_t> domain;

  struct Pred {
    int arity = 0;
    // layout: world-major, argument tuple little-endian in base `carrier`
    std::vector<uint8_t> table;
  };
  std::map<std::string, Pred> predicates;
  std::map<std::string, int> constants;
  struct Func {
    int arity = 1;
    std::vector<int> table;  // tuple index -> element
  };
  std::map<std::string, Func> functions;

  bool rel(const std::string& index, int w, int v) const {
    return relations.at(index)[static_cast<size_t>(w) * worlds + v] != 0;
  }
  bool in_domain(int w, int d) const {
    return domain[static_cast<size_t>(w) * carrier + d] != 0;
  }
  std::string describe() const;
};

// Direct Kripke satisfaction at a world. Quantifiers range over the current
// world's domain (actualist) except under constant-domain semantics, where
// they range over the whole carrier.
bool eval_modal(const Expr& f, const KripkeModel& model, int world, DomainSemantics quant_style);

// ---------------------------------------------------------------------------
// Finite higher-order evaluation

struct FnVal;

struct Val {
  long long scalar = 0;
  std::shared_ptr<const FnVal> fn;
  bool is_fn() const { return fn != nullptr; }
};

struct FnVal {
  Type type;               // full function type
  long long arg_size = 0;  // number of canonical argument values
  std::vector<Val> table;  // indexed by canonical argument index
};

struct Interp {
  std::map<std::string, long long> type_sizes;  // base types; $o is implicit
  std::map<std::string, Val> symbols;

  long long size_of(const Type& t) const;
};

// Builds a function value from a result callback over canonical indices.
Val make_fn(const Interp& interp, const Type& type,
            const std::function<Val(long long)>& result);

long long value_index(const Val& v, const Type& type, const Interp& interp);
Val value_from_index(long long index, const Type& type, const Interp& interp);

// Evaluates a closed boolean formula under the interpretation; standard
// finite semantics over full function spaces. Throws UnassignedSymbol for
// uninterpreted symbols and BoundsTooLarge when a quantified function space
// exceeds the evaluator ceiling.
bool eval_hol(const Expr& f, const Interp& interp);

// The embedded-signature interpretation induced by a Kripke model: the
// relation interprets the accessibility symbols, domain membership the eiw
// predicates, and user symbols are lifted pointwise. current_world is bound
// to `world`.
Interp induced_interp(const KripkeModel& model, const EmbeddingPlan& plan,
                      const Signature& signature, int world);

// ---------------------------------------------------------------------------
// Model enumeration

struct OracleSignature {
  std::vector<std::pair<std::string, int>> predicates;  // name, arity
  std::vector<std::string> constants;
  std::vector<std::string> indices;  // modal indices, "" for unindexed
};

struct OracleBounds {
  int max_worlds = 3;
  int max_domain = 2;
  bool force = false;  // lift the practical ceiling (4 worlds, 2 elements)
};

// Exhaustive, duplicate-free enumeration of models with exactly `worlds`
// worlds over a carrier of `carrier` elements, restricted to the frame
// class (per index) and the domain discipline; constants satisfy the
// local-term condition when `local_terms` is set. The callback receives a
// deterministic ordinal; returning false stops the enumeration.
// `stride`/`offset` partition the model space for parallel scans.
void for_each_model(const OracleSignature& sig, int worlds, int carrier,
                    const std::map<std::string, std::set<FrameCondition>>& frame,
                    DomainSemantics discipline, bool local_terms,
                    const std::function<bool(const KripkeModel&, long long)>& cb,
                    long long& ordinal, int stride = 1, int offset = 0);

// Collects models across 1..bounds.max_worlds (convenience for tests; checks
// the ceiling). Throws BoundsTooLarge above the ceiling unless forced.
std::vector<KripkeModel> enumerate_models(const OracleSignature& sig, const OracleBounds& bounds,
                                          const std::set<FrameCondition>& frame,
                                          DomainSemantics discipline, bool local_terms,
                                          bool exact_worlds = true);

// ---------------------------------------------------------------------------
// Cross-checking

struct ModelWitness {
  KripkeModel model;
  int world = 0;
};

struct FormulaCheck {
  std::string name;
  std::string text;
  long long points = 0;      // (model, world) pairs examined
  long long mismatches = 0;  // direct vs embedded disagreements
  std::optional<ModelWitness> first_mismatch;
  bool first_mismatch_direct = false;  // direct value at the first mismatch
  bool valid = true;                   // direct evaluation true everywhere
  std::optional<ModelWitness> countermodel;
};

struct CheckReport {
  std::vector<FormulaCheck> formulas;
  long long models = 0;

  long long total_mismatches() const {
    long long n = 0;
    for (const auto& f : formulas) n += f.mismatches;
    return n;
  }
  bool ok() const { return total_mismatches() == 0; }
};

// For every model within bounds (1..max_worlds worlds) in the spec's frame
// class and domain discipline, and every world, checks that direct modal
// evaluation agrees with finite evaluation of the embedded formula, and
// tracks validity with a first countermodel. Throws UnsupportedFragment for
// formulas outside the oracle fragment and BoundsTooLarge above the ceiling
// (unless forced).
CheckReport cross_check(const std::vector<std::pair<std::string, Expr>>& formulas,
                        const LogicSpec& spec, const OracleBounds& bounds,
                        const EmbedOptions& embed = {}, int workers = 0);

// Validity of a source formula by direct evaluation over a frame class.
struct ValidityResult {
  bool valid = true;
  long long models = 0;
  std::optional<ModelWitness> countermodel;
};

ValidityResult check_validity(const Expr& f, const std::set<FrameCondition>& frame,
                              DomainSemantics discipline, const OracleBounds& bounds,
                              int workers = 0);

// Validity of the embedded form of a source formula, evaluated with eval_hol
// over all models of a frame class (bounded). frame_override replaces the
// spec's frame class for model enumeration (used for the universal-relation
// comparison).
ValidityResult check_validity_hol(const Expr& f, const LogicSpec& spec,
                                  const EmbedOptions& embed, const OracleBounds& bounds,
                                  const std::optional<std::set<FrameCondition>>& frame_override =
                                      std::nullopt,
                                  int workers = 0);

std::string render_report_text(const CheckReport& report);
std::string render_report_json(const CheckReport& report);

}  // namespace modalkit

#endif  // MODALKIT_KRIPKE_HPP_
