#include "modalkit/syntax.hpp"

#include <algorithm>
#include <cassert>

namespace modalkit {

// ---------------------------------------------------------------------------
// Type

struct Type::Node {
  TypeKind kind;
  std::string name;  // Base
  Type from, to;     // Fun
};

Type Type::base(std::string name) {
  auto n = std::make_shared<Node>();
  n->kind = TypeKind::Base;
  n->name = std::move(name);
  return Type(std::move(n));
}

Type Type::fun(Type from, Type to) {
  assert(from.valid() && to.valid());
  auto n = std::make_shared<Node>();
  n->kind = TypeKind::Fun;
  n->from = std::move(from);
  n->to = std::move(to);
  return Type(std::move(n));
}

Type Type::fun(const std::vector<Type>& args, Type result) {
  Type t = std::move(result);
  for (auto it = args.rbegin(); it != args.rend(); ++it) t = fun(*it, t);
  return t;
}

TypeKind Type::kind() const { return node_->kind; }
const std::string& Type::name() const { assert(is_base()); return node_->name; }
const Type& Type::from() const { assert(is_fun()); return node_->from; }
const Type& Type::to() const { assert(is_fun()); return node_->to; }

int Type::arity() const {
  int n = 0;
  for (Type t = *this; t.is_fun(); t = t.to()) n++;
  return n;
}

std::vector<Type> Type::args() const {
  std::vector<Type> out;
  for (Type t = *this; t.is_fun(); t = t.to()) out.push_back(t.from());
  return out;
}

Type Type::result() const {
  Type t = *this;
  while (t.is_fun()) t = t.to();
  return t;
}

bool Type::mentions_bool() const {
  if (!valid()) return false;
  if (is_base()) return name() == "$o";
  return from().mentions_bool() || to().mentions_bool();
}

bool Type::operator==(const Type& other) const {
  if (node_ == other.node_) return true;
  if (!node_ || !other.node_) return false;
  if (kind() != other.kind()) return false;
  if (is_base()) return name() == other.name();
  return from() == other.from() && to() == other.to();
}

std::string Type::show() const {
  if (!valid()) return "<null>";
  if (is_base()) return name();
  std::string lhs = from().is_fun() ? "(" + from().show() + ")" : from().show();
  return lhs + " > " + to().show();
}

namespace types {
Type individual() {
  static const Type t = Type::base("$i");
  return t;
}
Type boolean() {
  static const Type t = Type::base("$o");
  return t;
}
Type ttype() {
  static const Type t = Type::base("$tType");
  return t;
}
}  // namespace types

// ---------------------------------------------------------------------------
// Expr

struct Expr::Node {
  ExprKind kind;
  std::string name;
  std::vector<Expr> args;        // App/NclApp args; Apply {fun, arg}; Eq/Binary {lhs, rhs}
  Expr sub;                      // Not/Quant/Modal/Lambda body
  Type type;                     // Quant/Lambda bound type
  BinOp bin_op = BinOp::And;
  QuantKind quant = QuantKind::Forall;
  ModalOp modal = ModalOp::Box;
  std::optional<std::string> index;
  std::vector<NclParam> params;
  bool truth = false;
  bool has_modal = false;
  bool has_ho = false;
};

std::shared_ptr<Expr::Node> Expr::make_node(ExprKind kind) {
  auto n = std::make_shared<Node>();
  n->kind = kind;
  return n;
}

void Expr::absorb_flags(Node& node, const Expr& child) {
  node.has_modal = node.has_modal || child.contains_modal();
  node.has_ho = node.has_ho || child.contains_ho();
}

Expr Expr::var(std::string name) {
  auto n = make_node(ExprKind::Var);
  n->name = std::move(name);
  return Expr(std::move(n));
}

Expr Expr::constant(std::string name) {
  auto n = make_node(ExprKind::Const);
  n->name = std::move(name);
  return Expr(std::move(n));
}

Expr Expr::app(std::string head, std::vector<Expr> args) {
  if (args.empty()) return constant(std::move(head));
  auto n = make_node(ExprKind::App);
  n->name = std::move(head);
  for (const Expr& a : args) absorb_flags(*n, a);
  n->args = std::move(args);
  return Expr(std::move(n));
}

Expr Expr::eq(Expr lhs, Expr rhs) {
  auto n = make_node(ExprKind::Eq);
  absorb_flags(*n, lhs);
  absorb_flags(*n, rhs);
  n->args = {std::move(lhs), std::move(rhs)};
  return Expr(std::move(n));
}

Expr Expr::neg(Expr f) {
  auto n = make_node(ExprKind::Not);
  absorb_flags(*n, f);
  n->sub = std::move(f);
  return Expr(std::move(n));
}

Expr Expr::binary(BinOp op, Expr lhs, Expr rhs) {
  auto n = make_node(ExprKind::Binary);
  n->bin_op = op;
  absorb_flags(*n, lhs);
  absorb_flags(*n, rhs);
  n->args = {std::move(lhs), std::move(rhs)};
  return Expr(std::move(n));
}

Expr Expr::quant(QuantKind q, std::string var, Type var_type, Expr body) {
  auto n = make_node(ExprKind::Quant);
  n->quant = q;
  n->name = std::move(var);
  n->type = std::move(var_type);
  absorb_flags(*n, body);
  n->sub = std::move(body);
  return Expr(std::move(n));
}

Expr Expr::modal(ModalOp op, std::optional<std::string> index, Expr body) {
  auto n = make_node(ExprKind::Modal);
  n->modal = op;
  n->index = std::move(index);
  absorb_flags(*n, body);
  n->has_modal = true;
  n->sub = std::move(body);
  return Expr(std::move(n));
}

Expr Expr::ncl(std::string name, std::vector<NclParam> params, std::vector<Expr> args) {
  auto n = make_node(ExprKind::NclApp);
  n->name = std::move(name);
  n->params = std::move(params);
  for (const Expr& a : args) absorb_flags(*n, a);
  n->has_modal = true;
  n->args = std::move(args);
  return Expr(std::move(n));
}

Expr Expr::truth(bool value) {
  auto n = make_node(ExprKind::Truth);
  n->truth = value;
  return Expr(std::move(n));
}

Expr Expr::lambda(std::string var, Type var_type, Expr body) {
  auto n = make_node(ExprKind::Lambda);
  n->name = std::move(var);
  n->type = std::move(var_type);
  absorb_flags(*n, body);
  n->has_ho = true;
  n->sub = std::move(body);
  return Expr(std::move(n));
}

Expr Expr::apply(Expr fun, Expr arg) {
  auto n = make_node(ExprKind::Apply);
  absorb_flags(*n, fun);
  absorb_flags(*n, arg);
  n->has_ho = true;
  n->args = {std::move(fun), std::move(arg)};
  return Expr(std::move(n));
}

Expr Expr::apply(Expr fun, const std::vector<Expr>& args) {
  Expr f = std::move(fun);
  for (const Expr& a : args) f = apply(std::move(f), a);
  return f;
}

ExprKind Expr::kind() const { return node_->kind; }
const std::string& Expr::name() const { return node_->name; }
const std::vector<Expr>& Expr::args() const { return node_->args; }
const Expr& Expr::lhs() const { assert(node_->args.size() == 2); return node_->args[0]; }
const Expr& Expr::rhs() const { assert(node_->args.size() == 2); return node_->args[1]; }
const Expr& Expr::body() const { assert(node_->sub.valid()); return node_->sub; }
BinOp Expr::op() const { return node_->bin_op; }
QuantKind Expr::quant_kind() const { return node_->quant; }
const std::string& Expr::bound_var() const { return node_->name; }
const Type& Expr::bound_type() const { return node_->type; }
ModalOp Expr::modal_op() const { return node_->modal; }
const std::optional<std::string>& Expr::modal_index() const { return node_->index; }
const std::vector<NclParam>& Expr::ncl_params() const { return node_->params; }
bool Expr::truth_value() const { return node_->truth; }
const Expr& Expr::fun() const { assert(kind() == ExprKind::Apply); return node_->args[0]; }
const Expr& Expr::arg() const { assert(kind() == ExprKind::Apply); return node_->args[1]; }
bool Expr::contains_modal() const { return node_ && node_->has_modal; }
bool Expr::contains_ho() const { return node_ && node_->has_ho; }

namespace {

bool equal_rec(const Expr& a, const Expr& b, std::vector<std::pair<std::string, std::string>>* binders) {
  if (a.kind() != b.kind()) return false;
  switch (a.kind()) {
    case ExprKind::Var: {
      if (binders) {
        for (auto it = binders->rbegin(); it != binders->rend(); ++it) {
          bool la = it->first == a.name(), lb = it->second == b.name();
          if (la || lb) return la && lb;
        }
      }
      return a.name() == b.name();
    }
    case ExprKind::Const:
      return a.name() == b.name();
    case ExprKind::App:
    case ExprKind::NclApp: {
      if (a.name() != b.name() || a.args().size() != b.args().size()) return false;
      if (a.kind() == ExprKind::NclApp && a.ncl_params() != b.ncl_params()) return false;
      for (size_t i = 0; i < a.args().size(); i++)
        if (!equal_rec(a.args()[i], b.args()[i], binders)) return false;
      return true;
    }
    case ExprKind::Eq:
      return equal_rec(a.lhs(), b.lhs(), binders) && equal_rec(a.rhs(), b.rhs(), binders);
    case ExprKind::Not:
      return equal_rec(a.body(), b.body(), binders);
    case ExprKind::Binary:
      return a.op() == b.op() && equal_rec(a.lhs(), b.lhs(), binders) &&
             equal_rec(a.rhs(), b.rhs(), binders);
    case ExprKind::Quant: {
      if (a.quant_kind() != b.quant_kind() || a.bound_type() != b.bound_type()) return false;
      if (!binders && a.bound_var() != b.bound_var()) return false;
      if (!binders) return equal_rec(a.body(), b.body(), binders);
      binders->emplace_back(a.bound_var(), b.bound_var());
      bool r = equal_rec(a.body(), b.body(), binders);
      binders->pop_back();
      return r;
    }
    case ExprKind::Lambda: {
      if (a.bound_type() != b.bound_type()) return false;
      if (!binders && a.bound_var() != b.bound_var()) return false;
      if (!binders) return equal_rec(a.body(), b.body(), binders);
      binders->emplace_back(a.bound_var(), b.bound_var());
      bool r = equal_rec(a.body(), b.body(), binders);
      binders->pop_back();
      return r;
    }
    case ExprKind::Modal:
      return a.modal_op() == b.modal_op() && a.modal_index() == b.modal_index() &&
             equal_rec(a.body(), b.body(), binders);
    case ExprKind::Truth:
      return a.truth_value() == b.truth_value();
    case ExprKind::Apply:
      return equal_rec(a.fun(), b.fun(), binders) && equal_rec(a.arg(), b.arg(), binders);
  }
  return false;
}

}  // namespace

bool Expr::identical(const Expr& a, const Expr& b) {
  if (!a.valid() || !b.valid()) return a.valid() == b.valid();
  return equal_rec(a, b, nullptr);
}

bool Expr::alpha_equal(const Expr& a, const Expr& b) {
  if (!a.valid() || !b.valid()) return a.valid() == b.valid();
  std::vector<std::pair<std::string, std::string>> binders;
  return equal_rec(a, b, &binders);
}

// ---------------------------------------------------------------------------
// Role

Locality Role::effective_locality() const {
  if (base == RoleBase::Conjecture) return Locality::Local;
  if (subrole) return *subrole;
  return base == RoleBase::Hypothesis ? Locality::Local : Locality::Global;
}

std::string Role::show() const {
  std::string s;
  switch (base) {
    case RoleBase::Axiom: s = "axiom"; break;
    case RoleBase::Hypothesis: s = "hypothesis"; break;
    case RoleBase::Conjecture: s = "conjecture"; break;
    case RoleBase::Lemma: s = "lemma"; break;
    case RoleBase::Definition: s = "definition"; break;
    case RoleBase::TypeDecl: s = "type"; break;
    case RoleBase::Logic: s = "logic"; break;
  }
  if (subrole) s += *subrole == Locality::Local ? "-local" : "-global";
  return s;
}

std::optional<Role> Role::parse(const std::string& text) {
  std::string base = text;
  std::optional<Locality> sub;
  if (auto pos = text.find('-'); pos != std::string::npos) {
    base = text.substr(0, pos);
    std::string s = text.substr(pos + 1);
    if (s == "local") sub = Locality::Local;
    else if (s == "global") sub = Locality::Global;
    else return std::nullopt;
  }
  RoleBase rb;
  if (base == "axiom") rb = RoleBase::Axiom;
  else if (base == "hypothesis") rb = RoleBase::Hypothesis;
  else if (base == "conjecture") rb = RoleBase::Conjecture;
  else if (base == "lemma") rb = RoleBase::Lemma;
  else if (base == "definition") rb = RoleBase::Definition;
  else if (base == "type") rb = RoleBase::TypeDecl;
  else if (base == "logic") rb = RoleBase::Logic;
  else return std::nullopt;
  if (sub && (rb == RoleBase::TypeDecl || rb == RoleBase::Logic || rb == RoleBase::Conjecture))
    return std::nullopt;
  return Role{rb, sub};
}

FormulaLanguage AnnotatedFormula::language() const {
  bool ncl = is_formula() && formula().contains_modal();
  if (keyword == FormKeyword::Tff)
    return ncl ? FormulaLanguage::NonClassicalFirstOrder : FormulaLanguage::TypedFirstOrder;
  return ncl ? FormulaLanguage::NonClassicalHigherOrder : FormulaLanguage::TypedHigherOrder;
}

// ---------------------------------------------------------------------------
// Signature / Problem

const Type* Signature::lookup(const std::string& name) const {
  auto it = index_.find(name);
  return it == index_.end() ? nullptr : &entries_[it->second].second;
}

void Signature::set(const std::string& name, Type type) {
  auto it = index_.find(name);
  if (it != index_.end()) {
    entries_[it->second].second = std::move(type);
    return;
  }
  index_[name] = entries_.size();
  entries_.emplace_back(name, std::move(type));
}

const LogicSpec* Problem::logic_spec() const {
  for (const auto& f : formulas)
    if (f.is_logic_spec()) return &f.logic_spec();
  return nullptr;
}

const AnnotatedFormula* Problem::conjecture() const {
  for (const auto& f : formulas)
    if (f.role.base == RoleBase::Conjecture) return &f;
  return nullptr;
}

std::vector<const AnnotatedFormula*> Problem::logical_formulas() const {
  std::vector<const AnnotatedFormula*> out;
  for (const auto& f : formulas)
    if (f.is_formula()) out.push_back(&f);
  return out;
}

// ---------------------------------------------------------------------------
// free_variables / modal_depth

namespace {

void free_vars_rec(const Expr& f, std::vector<std::string>& bound, std::set<std::string>& out) {
  switch (f.kind()) {
    case ExprKind::Var:
      if (std::find(bound.begin(), bound.end(), f.name()) == bound.end()) out.insert(f.name());
      return;
    case ExprKind::Const:
    case ExprKind::Truth:
      return;
    case ExprKind::App:
    case ExprKind::NclApp:
      for (const Expr& a : f.args()) free_vars_rec(a, bound, out);
      return;
    case ExprKind::Eq:
    case ExprKind::Binary:
    case ExprKind::Apply:
      free_vars_rec(f.args()[0], bound, out);
      free_vars_rec(f.args()[1], bound, out);
      return;
    case ExprKind::Not:
    case ExprKind::Modal:
      free_vars_rec(f.body(), bound, out);
      return;
    case ExprKind::Quant:
    case ExprKind::Lambda:
      bound.push_back(f.bound_var());
      free_vars_rec(f.body(), bound, out);
      bound.pop_back();
      return;
  }
}

}  // namespace

std::set<std::string> free_variables(const Expr& f) {
  std::set<std::string> out;
  std::vector<std::string> bound;
  free_vars_rec(f, bound, out);
  return out;
}

int modal_depth(const Expr& f) {
  switch (f.kind()) {
    case ExprKind::Var:
    case ExprKind::Const:
    case ExprKind::Truth:
      return 0;
    case ExprKind::App:
    case ExprKind::NclApp: {
      int d = 0;
      for (const Expr& a : f.args()) d = std::max(d, modal_depth(a));
      return d;
    }
    case ExprKind::Eq:
    case ExprKind::Binary:
    case ExprKind::Apply:
      return std::max(modal_depth(f.args()[0]), modal_depth(f.args()[1]));
    case ExprKind::Not:
    case ExprKind::Quant:
    case ExprKind::Lambda:
      return modal_depth(f.body());
    case ExprKind::Modal:
      return 1 + modal_depth(f.body());
  }
  return 0;
}

// ---------------------------------------------------------------------------
// Signature inference

namespace {

struct Usage {
  int arity = -1;
  bool as_predicate = false;
  bool as_function = false;
};

void record_usage(std::map<std::string, Usage>& usages, std::vector<std::string>& order,
                  const std::string& name, int arity, bool predicate) {
  auto it = usages.find(name);
  if (it == usages.end()) {
    order.push_back(name);
    it = usages.emplace(name, Usage{}).first;
  }
  Usage& u = it->second;
  if (u.arity >= 0 && u.arity != arity)
    throw ToolError(ErrorCode::ArityConflict,
                    "symbol '" + name + "' used with arities " + std::to_string(u.arity) +
                        " and " + std::to_string(arity));
  u.arity = arity;
  if (predicate) u.as_predicate = true;
  else u.as_function = true;
  if (u.as_predicate && u.as_function)
    throw ToolError(ErrorCode::SortConflict,
                    "symbol '" + name + "' used both as predicate and as function");
}

// formula = true when the expression sits in boolean position. Declared
// symbols are exempt from usage recording (their types are authoritative);
// higher-order subtrees are skipped entirely, as inference covers only the
// first-order fragment.
void scan_usages(const Expr& f, bool formula, const Signature& declared,
                 std::map<std::string, Usage>& usages, std::vector<std::string>& order) {
  switch (f.kind()) {
    case ExprKind::Var:
    case ExprKind::Truth:
      return;
    case ExprKind::Const:
      if (!declared.contains(f.name())) record_usage(usages, order, f.name(), 0, formula);
      return;
    case ExprKind::App:
      if (!declared.contains(f.name()))
        record_usage(usages, order, f.name(), static_cast<int>(f.args().size()), formula);
      for (const Expr& a : f.args()) scan_usages(a, false, declared, usages, order);
      return;
    case ExprKind::NclApp:
      for (const Expr& a : f.args()) scan_usages(a, true, declared, usages, order);
      return;
    case ExprKind::Eq:
      scan_usages(f.lhs(), false, declared, usages, order);
      scan_usages(f.rhs(), false, declared, usages, order);
      return;
    case ExprKind::Binary:
      scan_usages(f.lhs(), true, declared, usages, order);
      scan_usages(f.rhs(), true, declared, usages, order);
      return;
    case ExprKind::Not:
    case ExprKind::Modal:
      scan_usages(f.body(), true, declared, usages, order);
      return;
    case ExprKind::Quant:
      scan_usages(f.body(), true, declared, usages, order);
      return;
    case ExprKind::Lambda:
    case ExprKind::Apply:
      return;  // higher-order content requires declarations
  }
}

}  // namespace

Problem infer_signature(const Problem& p) {
  std::map<std::string, Usage> usages;
  std::vector<std::string> order;
  for (const auto& af : p.formulas) {
    if (!af.is_formula()) continue;
    scan_usages(af.formula(), true, p.signature, usages, order);
  }
  Problem out = p;
  for (const std::string& name : order) {
    if (out.signature.contains(name)) continue;
    const Usage& u = usages.at(name);
    std::vector<Type> args(static_cast<size_t>(u.arity), types::individual());
    Type result = u.as_predicate ? types::boolean() : types::individual();
    out.signature.set(name, Type::fun(args, result));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Connective normalization, substitution, beta reduction

Expr normalize_connectives(const Expr& f) {
  switch (f.kind()) {
    case ExprKind::Var:
    case ExprKind::Const:
    case ExprKind::Truth:
      return f;
    case ExprKind::App: {
      std::vector<Expr> args;
      for (const Expr& a : f.args()) args.push_back(normalize_connectives(a));
      return Expr::app(f.name(), std::move(args));
    }
    case ExprKind::NclApp: {
      std::vector<Expr> args;
      for (const Expr& a : f.args()) args.push_back(normalize_connectives(a));
      return Expr::ncl(f.name(), f.ncl_params(), std::move(args));
    }
    case ExprKind::Eq:
      return Expr::eq(normalize_connectives(f.lhs()), normalize_connectives(f.rhs()));
    case ExprKind::Not:
      return Expr::neg(normalize_connectives(f.body()));
    case ExprKind::Binary: {
      Expr l = normalize_connectives(f.lhs());
      Expr r = normalize_connectives(f.rhs());
      switch (f.op()) {
        case BinOp::ImpliedBy: return Expr::binary(BinOp::Implies, std::move(r), std::move(l));
        case BinOp::Xor: return Expr::neg(Expr::binary(BinOp::Iff, std::move(l), std::move(r)));
        default: return Expr::binary(f.op(), std::move(l), std::move(r));
      }
    }
    case ExprKind::Quant:
      return Expr::quant(f.quant_kind(), f.bound_var(), f.bound_type(),
                         normalize_connectives(f.body()));
    case ExprKind::Modal:
      return Expr::modal(f.modal_op(), f.modal_index(), normalize_connectives(f.body()));
    case ExprKind::Lambda:
      return Expr::lambda(f.bound_var(), f.bound_type(), normalize_connectives(f.body()));
    case ExprKind::Apply:
      return Expr::apply(normalize_connectives(f.fun()), normalize_connectives(f.arg()));
  }
  return f;
}

namespace {

std::string fresh_name(const std::string& base, const std::set<std::string>& avoid) {
  if (!avoid.count(base)) return base;
  for (int i = 1;; i++) {
    std::string cand = base + std::to_string(i);
    if (!avoid.count(cand)) return cand;
  }
}

Expr subst_rec(const Expr& f, const std::string& var, const Expr& value,
               const std::set<std::string>& value_frees) {
  switch (f.kind()) {
    case ExprKind::Var:
      return f.name() == var ? value : f;
    case ExprKind::Const:
    case ExprKind::Truth:
      return f;
    case ExprKind::App: {
      std::vector<Expr> args;
      for (const Expr& a : f.args()) args.push_back(subst_rec(a, var, value, value_frees));
      return Expr::app(f.name(), std::move(args));
    }
    case ExprKind::NclApp: {
      std::vector<Expr> args;
      for (const Expr& a : f.args()) args.push_back(subst_rec(a, var, value, value_frees));
      return Expr::ncl(f.name(), f.ncl_params(), std::move(args));
    }
    case ExprKind::Eq:
      return Expr::eq(subst_rec(f.lhs(), var, value, value_frees),
                      subst_rec(f.rhs(), var, value, value_frees));
    case ExprKind::Not:
      return Expr::neg(subst_rec(f.body(), var, value, value_frees));
    case ExprKind::Binary:
      return Expr::binary(f.op(), subst_rec(f.lhs(), var, value, value_frees),
                          subst_rec(f.rhs(), var, value, value_frees));
    case ExprKind::Modal:
      return Expr::modal(f.modal_op(), f.modal_index(),
                         subst_rec(f.body(), var, value, value_frees));
    case ExprKind::Quant:
    case ExprKind::Lambda: {
      if (f.bound_var() == var) return f;  // shadowed
      std::string bv = f.bound_var();
      Expr body = f.body();
      if (value_frees.count(bv)) {
        std::set<std::string> avoid = value_frees;
        for (const std::string& v : free_variables(body)) avoid.insert(v);
        avoid.insert(var);
        std::string renamed = fresh_name(bv, avoid);
        body = subst_rec(body, bv, Expr::var(renamed), {});
        bv = renamed;
      }
      Expr nb = subst_rec(body, var, value, value_frees);
      return f.kind() == ExprKind::Quant
                 ? Expr::quant(f.quant_kind(), bv, f.bound_type(), std::move(nb))
                 : Expr::lambda(bv, f.bound_type(), std::move(nb));
    }
    case ExprKind::Apply:
      return Expr::apply(subst_rec(f.fun(), var, value, value_frees),
                         subst_rec(f.arg(), var, value, value_frees));
  }
  return f;
}

}  // namespace

Expr substitute(const Expr& f, const std::string& var, const Expr& value) {
  return subst_rec(f, var, value, free_variables(value));
}

bool is_beta_normal(const Expr& f) {
  switch (f.kind()) {
    case ExprKind::Var:
    case ExprKind::Const:
    case ExprKind::Truth:
      return true;
    case ExprKind::App:
    case ExprKind::NclApp:
      for (const Expr& a : f.args())
        if (!is_beta_normal(a)) return false;
      return true;
    case ExprKind::Eq:
    case ExprKind::Binary:
      return is_beta_normal(f.args()[0]) && is_beta_normal(f.args()[1]);
    case ExprKind::Not:
    case ExprKind::Quant:
    case ExprKind::Modal:
    case ExprKind::Lambda:
      return is_beta_normal(f.body());
    case ExprKind::Apply:
      if (f.fun().kind() == ExprKind::Lambda) return false;
      return is_beta_normal(f.fun()) && is_beta_normal(f.arg());
  }
  return true;
}

Expr beta_normalize(const Expr& f) {
  switch (f.kind()) {
    case ExprKind::Var:
    case ExprKind::Const:
    case ExprKind::Truth:
      return f;
    case ExprKind::App: {
      std::vector<Expr> args;
      for (const Expr& a : f.args()) args.push_back(beta_normalize(a));
      return Expr::app(f.name(), std::move(args));
    }
    case ExprKind::NclApp: {
      std::vector<Expr> args;
      for (const Expr& a : f.args()) args.push_back(beta_normalize(a));
      return Expr::ncl(f.name(), f.ncl_params(), std::move(args));
    }
    case ExprKind::Eq:
      return Expr::eq(beta_normalize(f.lhs()), beta_normalize(f.rhs()));
    case ExprKind::Not:
      return Expr::neg(beta_normalize(f.body()));
    case ExprKind::Binary:
      return Expr::binary(f.op(), beta_normalize(f.lhs()), beta_normalize(f.rhs()));
    case ExprKind::Quant:
      return Expr::quant(f.quant_kind(), f.bound_var(), f.bound_type(), beta_normalize(f.body()));
    case ExprKind::Modal:
      return Expr::modal(f.modal_op(), f.modal_index(), beta_normalize(f.body()));
    case ExprKind::Lambda:
      return Expr::lambda(f.bound_var(), f.bound_type(), beta_normalize(f.body()));
    case ExprKind::Apply: {
      Expr fun = beta_normalize(f.fun());
      Expr arg = beta_normalize(f.arg());
      if (fun.kind() == ExprKind::Lambda)
        return beta_normalize(substitute(fun.body(), fun.bound_var(), arg));
      return Expr::apply(std::move(fun), std::move(arg));
    }
  }
  return f;
}

Expr delta_expand(const Expr& f, const std::map<std::string, Expr>& defs) {
  switch (f.kind()) {
    case ExprKind::Const: {
      auto it = defs.find(f.name());
      return it == defs.end() ? f : delta_expand(it->second, defs);
    }
    case ExprKind::Var:
    case ExprKind::Truth:
      return f;
    case ExprKind::App: {
      std::vector<Expr> args;
      for (const Expr& a : f.args()) args.push_back(delta_expand(a, defs));
      return Expr::app(f.name(), std::move(args));
    }
    case ExprKind::NclApp: {
      std::vector<Expr> args;
      for (const Expr& a : f.args()) args.push_back(delta_expand(a, defs));
      return Expr::ncl(f.name(), f.ncl_params(), std::move(args));
    }
    case ExprKind::Eq:
      return Expr::eq(delta_expand(f.lhs(), defs), delta_expand(f.rhs(), defs));
    case ExprKind::Not:
      return Expr::neg(delta_expand(f.body(), defs));
    case ExprKind::Binary:
      return Expr::binary(f.op(), delta_expand(f.lhs(), defs), delta_expand(f.rhs(), defs));
    case ExprKind::Quant:
      return Expr::quant(f.quant_kind(), f.bound_var(), f.bound_type(),
                         delta_expand(f.body(), defs));
    case ExprKind::Modal:
      return Expr::modal(f.modal_op(), f.modal_index(), delta_expand(f.body(), defs));
    case ExprKind::Lambda:
      return Expr::lambda(f.bound_var(), f.bound_type(), delta_expand(f.body(), defs));
    case ExprKind::Apply:
      return Expr::apply(delta_expand(f.fun(), defs), delta_expand(f.arg(), defs));
  }
  return f;
}

// ---------------------------------------------------------------------------
// Collectors

namespace {

void collect_symbols_rec(const Expr& f, std::vector<std::string>& bound,
                         std::vector<std::string>& order, std::set<std::string>& seen) {
  switch (f.kind()) {
    case ExprKind::Var:
    case ExprKind::Truth:
      return;
    case ExprKind::Const:
    case ExprKind::App:
      if (!seen.count(f.name())) {
        seen.insert(f.name());
        order.push_back(f.name());
      }
      for (const Expr& a : f.args()) collect_symbols_rec(a, bound, order, seen);
      return;
    case ExprKind::NclApp:
      for (const Expr& a : f.args()) collect_symbols_rec(a, bound, order, seen);
      return;
    case ExprKind::Eq:
    case ExprKind::Binary:
    case ExprKind::Apply:
      collect_symbols_rec(f.args()[0], bound, order, seen);
      collect_symbols_rec(f.args()[1], bound, order, seen);
      return;
    case ExprKind::Not:
    case ExprKind::Modal:
      collect_symbols_rec(f.body(), bound, order, seen);
      return;
    case ExprKind::Quant:
    case ExprKind::Lambda:
      bound.push_back(f.bound_var());
      collect_symbols_rec(f.body(), bound, order, seen);
      bound.pop_back();
      return;
  }
}

void collect_indices_rec(const Expr& f, std::vector<std::string>& order,
                         std::set<std::string>& seen) {
  if (f.kind() == ExprKind::Modal) {
    std::string idx = f.modal_index().value_or("");
    if (!seen.count(idx)) {
      seen.insert(idx);
      order.push_back(idx);
    }
    collect_indices_rec(f.body(), order, seen);
    return;
  }
  switch (f.kind()) {
    case ExprKind::App:
    case ExprKind::NclApp:
      for (const Expr& a : f.args()) collect_indices_rec(a, order, seen);
      return;
    case ExprKind::Eq:
    case ExprKind::Binary:
    case ExprKind::Apply:
      collect_indices_rec(f.args()[0], order, seen);
      collect_indices_rec(f.args()[1], order, seen);
      return;
    case ExprKind::Not:
    case ExprKind::Quant:
    case ExprKind::Lambda:
      collect_indices_rec(f.body(), order, seen);
      return;
    default:
      return;
  }
}

void collect_binder_types_rec(const Expr& f, std::vector<Type>& out) {
  switch (f.kind()) {
    case ExprKind::Quant:
    case ExprKind::Lambda:
      out.push_back(f.bound_type());
      collect_binder_types_rec(f.body(), out);
      return;
    case ExprKind::App:
    case ExprKind::NclApp:
      for (const Expr& a : f.args()) collect_binder_types_rec(a, out);
      return;
    case ExprKind::Eq:
    case ExprKind::Binary:
    case ExprKind::Apply:
      collect_binder_types_rec(f.args()[0], out);
      collect_binder_types_rec(f.args()[1], out);
      return;
    case ExprKind::Not:
    case ExprKind::Modal:
      collect_binder_types_rec(f.body(), out);
      return;
    default:
      return;
  }
}

void add_base_types(const Type& t, std::vector<std::string>& order, std::set<std::string>& seen) {
  if (!t.valid()) return;
  if (t.is_base()) {
    const std::string& n = t.name();
    if (n == "$o" || n == "$tType") return;
    if (!seen.count(n)) {
      seen.insert(n);
      order.push_back(n);
    }
    return;
  }
  add_base_types(t.from(), order, seen);
  add_base_types(t.to(), order, seen);
}

}  // namespace

std::vector<std::string> collect_symbols(const Problem& p) {
  std::vector<std::string> order, bound;
  std::set<std::string> seen;
  for (const auto& af : p.formulas)
    if (af.is_formula()) collect_symbols_rec(af.formula(), bound, order, seen);
  return order;
}

std::vector<std::string> collect_modal_indices(const Problem& p) {
  std::vector<std::string> order;
  std::set<std::string> seen;
  for (const auto& af : p.formulas)
    if (af.is_formula()) collect_indices_rec(af.formula(), order, seen);
  return order;
}

std::vector<std::string> collect_individual_types(const Problem& p) {
  std::vector<std::string> order;
  std::set<std::string> seen;
  std::vector<Type> binder_types;
  for (const auto& af : p.formulas)
    if (af.is_formula()) collect_binder_types_rec(af.formula(), binder_types);
  for (const Type& t : binder_types) add_base_types(t, order, seen);
  for (const auto& [name, type] : p.signature.entries()) {
    if (type.is_base("$tType")) {
      // declared user base type
      if (!seen.count(name)) {
        seen.insert(name);
        order.push_back(name);
      }
      continue;
    }
    add_base_types(type, order, seen);
  }
  return order;
}

}  // namespace modalkit
