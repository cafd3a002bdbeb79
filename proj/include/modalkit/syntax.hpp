// modalkit :: shared abstract syntax for modal source problems and
// higher-order target problems

#ifndef MODALKIT_SYNTAX_HPP_
#define MODALKIT_SYNTAX_HPP_

#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include "modalkit/diagnostics.hpp"
#include "modalkit/logic_spec.hpp"

namespace modalkit {

// ---------------------------------------------------------------------------
// Simple types

enum class TypeKind { Base, Fun };

// Immutable simple type: base names ($i, $o, $tType, user types, the world
// type) and right-associative function types.
class Type {
 public:
  Type() = default;  // null type; only containers should hold one

  static Type base(std::string name);
  static Type fun(Type from, Type to);
  static Type fun(const std::vector<Type>& args, Type result);

  bool valid() const { return node_ != nullptr; }
  TypeKind kind() const;
  const std::string& name() const;  // Base only
  const Type& from() const;         // Fun only
  const Type& to() const;           // Fun only

  bool is_base() const { return valid() && kind() == TypeKind::Base; }
  bool is_base(const std::string& n) const { return is_base() && name() == n; }
  bool is_fun() const { return valid() && kind() == TypeKind::Fun; }

  // For t1 > ... > tn > r: arity n, argument list and final result type.
  int arity() const;
  std::vector<Type> args() const;
  Type result() const;

  // True if $o occurs anywhere in the type.
  bool mentions_bool() const;

  bool operator==(const Type& other) const;
  bool operator!=(const Type& other) const { return !(*this == other); }

  std::string show() const;  // "$i > $o" etc., minimally parenthesized

 private:
  struct Node;
  explicit Type(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
  std::shared_ptr<const Node> node_;
};

namespace types {
Type individual();  // $i
Type boolean();     // $o
Type ttype();       // $tType
}  // namespace types

// ---------------------------------------------------------------------------
// Expressions

enum class ExprKind {
  Var,      // variable (term- or formula-level, type known from binder)
  Const,    // constant / nullary predicate
  App,      // first-order application  head(t1, ..., tn)
  Eq,       // s = t
  Not,
  Binary,
  Quant,
  Modal,    // {$box}/{$dia}, optional index
  NclApp,   // unrecognized non-classical connective, kept for printing
  Truth,    // $true / $false
  Lambda,   // ^ [X: t]: body          (target stage)
  Apply,    // curried application f @ a (target stage)
};

enum class BinOp { And, Or, Implies, ImpliedBy, Iff, Xor };
enum class QuantKind { Forall, Exists };
enum class ModalOp { Box, Dia };

// Parameter of a generic {$name(...)} connective: either the #index (key
// "#", single value) or a key := value(s) assignment.
struct NclParam {
  std::string key;
  std::vector<std::string> values;
  bool list = false;  // value was [v1, ...]
  bool operator==(const NclParam&) const = default;
};

// Immutable expression tree shared by the modal source language and the
// higher-order target language. Values are cheap to copy (shared nodes).
class Expr {
 public:
  Expr() = default;

  static Expr var(std::string name);
  static Expr constant(std::string name);
  static Expr app(std::string head, std::vector<Expr> args);
  static Expr eq(Expr lhs, Expr rhs);
  static Expr neg(Expr f);
  static Expr binary(BinOp op, Expr lhs, Expr rhs);
  static Expr quant(QuantKind q, std::string var, Type var_type, Expr body);
  static Expr modal(ModalOp op, std::optional<std::string> index, Expr body);
  static Expr ncl(std::string name, std::vector<NclParam> params, std::vector<Expr> args);
  static Expr truth(bool value);
  static Expr lambda(std::string var, Type var_type, Expr body);
  static Expr apply(Expr fun, Expr arg);
  static Expr apply(Expr fun, const std::vector<Expr>& args);

  bool valid() const { return node_ != nullptr; }
  ExprKind kind() const;

  // Accessors; each asserts the matching kind.
  const std::string& name() const;             // Var, Const, App head, NclApp
  const std::vector<Expr>& args() const;       // App, NclApp
  const Expr& lhs() const;                     // Eq, Binary
  const Expr& rhs() const;                     // Eq, Binary
  const Expr& body() const;                    // Not, Quant, Modal, Lambda
  BinOp op() const;                            // Binary
  QuantKind quant_kind() const;                // Quant
  const std::string& bound_var() const;        // Quant, Lambda
  const Type& bound_type() const;              // Quant, Lambda
  ModalOp modal_op() const;                    // Modal
  const std::optional<std::string>& modal_index() const;  // Modal
  const std::vector<NclParam>& ncl_params() const;        // NclApp
  bool truth_value() const;                    // Truth
  const Expr& fun() const;                     // Apply
  const Expr& arg() const;                     // Apply

  // Stage fingerprints, O(1): computed at construction.
  bool contains_modal() const;  // Modal or NclApp nodes
  bool contains_ho() const;     // Lambda or Apply nodes

  // Structural equality with exact bound-variable names.
  static bool identical(const Expr& a, const Expr& b);
  // Equality modulo renaming of bound variables.
  static bool alpha_equal(const Expr& a, const Expr& b);

 private:
  struct Node;
  explicit Expr(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
  static std::shared_ptr<Node> make_node(ExprKind kind);
  static void absorb_flags(Node& node, const Expr& child);
  std::shared_ptr<const Node> node_;
};

// ---------------------------------------------------------------------------
// Roles and annotated formulae

enum class RoleBase { Axiom, Hypothesis, Conjecture, Lemma, Definition, TypeDecl, Logic };
enum class Locality { Local, Global };

struct Role {
  RoleBase base = RoleBase::Axiom;
  std::optional<Locality> subrole;

  // axiom/lemma/definition default to global, hypothesis to local, and a
  // conjecture is always local (local consequence).
  Locality effective_locality() const;
  std::string show() const;
  static std::optional<Role> parse(const std::string& text);
  bool operator==(const Role&) const = default;
};

struct TypeDecl {
  std::string symbol;
  Type type;
  bool operator==(const TypeDecl& o) const { return symbol == o.symbol && type == o.type; }
};

enum class FormKeyword { Tff, Thf };

enum class FormulaLanguage {
  TypedFirstOrder,          // tff, classical content
  TypedHigherOrder,         // thf, classical content
  NonClassicalFirstOrder,   // tff + non-classical connectives (NXF)
  NonClassicalHigherOrder,  // thf + non-classical connectives (NHF)
};

struct AnnotatedFormula {
  FormKeyword keyword = FormKeyword::Tff;
  std::string name;
  Role role;
  std::variant<Expr, TypeDecl, LogicSpec> content;

  // Optional extra-logical trailing fields, preserved verbatim.
  std::string source;
  std::string useful_info;

  bool is_formula() const { return std::holds_alternative<Expr>(content); }
  bool is_type_decl() const { return std::holds_alternative<TypeDecl>(content); }
  bool is_logic_spec() const { return std::holds_alternative<LogicSpec>(content); }
  const Expr& formula() const { return std::get<Expr>(content); }
  const TypeDecl& type_decl() const { return std::get<TypeDecl>(content); }
  const LogicSpec& logic_spec() const { return std::get<LogicSpec>(content); }

  FormulaLanguage language() const;
};

// ---------------------------------------------------------------------------
// Problems

// Symbol signature with deterministic (first-insertion) order.
class Signature {
 public:
  bool contains(const std::string& name) const { return index_.count(name) > 0; }
  const Type* lookup(const std::string& name) const;
  // Inserts or overwrites; keeps first-insertion order.
  void set(const std::string& name, Type type);
  const std::vector<std::pair<std::string, Type>>& entries() const { return entries_; }
  bool operator==(const Signature& o) const { return entries_ == o.entries_; }

 private:
  std::vector<std::pair<std::string, Type>> entries_;
  std::map<std::string, size_t> index_;
};

struct Problem {
  std::vector<AnnotatedFormula> formulas;
  Signature signature;

  const LogicSpec* logic_spec() const;
  const AnnotatedFormula* conjecture() const;
  // Formulas with logical content (no type declarations, no logic spec).
  std::vector<const AnnotatedFormula*> logical_formulas() const;
};

// ---------------------------------------------------------------------------
// Operations

std::set<std::string> free_variables(const Expr& f);
int modal_depth(const Expr& f);

// Completes the signature of an (possibly untyped) problem: undeclared
// predicates of arity n get $i > ... > $i > $o, function symbols map to $i,
// individual constants get $i. Declared entries are never overridden.
// Throws ToolError(ArityConflict/SortConflict) on inconsistent use.
Problem infer_signature(const Problem& p);

// Rewrites <~> and <= to the primitive connectives (used before embedding).
Expr normalize_connectives(const Expr& f);

// Capture-avoiding substitution of `value` for free occurrences of `var`.
Expr substitute(const Expr& f, const std::string& var, const Expr& value);

// Leftmost-outermost beta normalization (guaranteed to terminate on typed
// terms; the embedding only ever produces normal forms).
Expr beta_normalize(const Expr& f);
bool is_beta_normal(const Expr& f);

// Recursively replaces defined symbols by their definition bodies.
Expr delta_expand(const Expr& f, const std::map<std::string, Expr>& defs);

// Symbol occurrences (constants / applied heads, not variables), in
// first-occurrence order over the formula list.
std::vector<std::string> collect_symbols(const Problem& p);
// Modal indices used in the problem; "" stands for the unindexed modality.
std::vector<std::string> collect_modal_indices(const Problem& p);
// Base types appearing in binders and the signature (excluding $o, $tType).
std::vector<std::string> collect_individual_types(const Problem& p);

}  // namespace modalkit

#endif  // MODALKIT_SYNTAX_HPP_
