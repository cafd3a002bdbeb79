#include "modalkit/kripke.hpp"

#include <algorithm>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "modalkit/printer.hpp"

namespace modalkit {

namespace {

constexpr long long kFnSpaceCeiling = 1ll << 20;
constexpr long long kEnumBitsCeiling = 44;

long long ipow(long long base, long long exp) {
  long long r = 1;
  for (long long i = 0; i < exp; i++) {
    if (r > (1ll << 62) / std::max<long long>(base, 1))
      throw ToolError(ErrorCode::BoundsTooLarge, "enumeration space overflow");
    r *= base;
  }
  return r;
}

}  // namespace

std::string KripkeModel::describe() const {
  std::ostringstream out;
  out << "worlds=" << worlds << " carrier=" << carrier;
  for (const auto& [idx, rel] : relations) {
    out << " R" << (idx.empty() ? "" : "[" + idx + "]") << "={";
    bool first = true;
    for (int w = 0; w < worlds; w++)
      for (int v = 0; v < worlds; v++)
        if (rel[static_cast<size_t>(w) * worlds + v]) {
          if (!first) out << ",";
          first = false;
          out << "(" << w << "," << v << ")";
        }
    out << "}";
  }
  out << " D=";
  for (int w = 0; w < worlds; w++) {
    out << (w ? "|" : "") << "{";
    bool first = true;
    for (int d = 0; d < carrier; d++)
      if (in_domain(w, d)) {
        if (!first) out << ",";
        first = false;
        out << d;
      }
    out << "}";
  }
  for (const auto& [name, pred] : predicates) {
    out << " " << name << "=";
    long long tuples = ipow(carrier, pred.arity);
    for (int w = 0; w < worlds; w++) {
      if (w) out << "|";
      for (long long t = 0; t < tuples; t++)
        out << (pred.table[static_cast<size_t>(w) * tuples + t] ? "1" : "0");
    }
  }
  for (const auto& [name, c] : constants) out << " " << name << "=" << c;
  return out.str();
}

// ---------------------------------------------------------------------------
// Direct modal evaluation

namespace {

struct ModalEnv {
  std::vector<std::pair<std::string, int>> vars;

  int lookup(const std::string& name) const {
    for (auto it = vars.rbegin(); it != vars.rend(); ++it)
      if (it->first == name) return it->second;
    throw ToolError(ErrorCode::UnassignedSymbol, "unbound variable '" + name + "'");
  }
};

int eval_term_direct(const Expr& t, const KripkeModel& m, ModalEnv& env) {
  switch (t.kind()) {
    case ExprKind::Var:
      return env.lookup(t.name());
    case ExprKind::Const: {
      auto it = m.constants.find(t.name());
      if (it == m.constants.end())
        throw ToolError(ErrorCode::UnassignedSymbol, "no interpretation for '" + t.name() + "'");
      return it->second;
    }
    case ExprKind::App: {
      auto it = m.functions.find(t.name());
      if (it == m.functions.end())
        throw ToolError(ErrorCode::UnassignedSymbol, "no interpretation for '" + t.name() + "'");
      long long index = 0, mult = 1;
      for (const Expr& a : t.args()) {
        index += eval_term_direct(a, m, env) * mult;
        mult *= m.carrier;
      }
      return it->second.table[index];
    }
    default:
      throw ToolError(ErrorCode::UnsupportedFragment, "expected a first-order term");
  }
}

bool eval_modal_rec(const Expr& f, const KripkeModel& m, int w, DomainSemantics style,
                    ModalEnv& env) {
  switch (f.kind()) {
    case ExprKind::Truth:
      return f.truth_value();
    case ExprKind::Const:
    case ExprKind::App: {
      auto it = m.predicates.find(f.name());
      if (it == m.predicates.end())
        throw ToolError(ErrorCode::UnassignedSymbol, "no interpretation for '" + f.name() + "'");
      const KripkeModel::Pred& p = it->second;
      long long index = 0, mult = 1;
      if (f.kind() == ExprKind::App) {
        for (const Expr& a : f.args()) {
          index += eval_term_direct(a, m, env) * mult;
          mult *= m.carrier;
        }
      }
      long long tuples = ipow(m.carrier, p.arity);
      return p.table[static_cast<size_t>(w) * tuples + index] != 0;
    }
    case ExprKind::Eq:
      return eval_term_direct(f.lhs(), m, env) == eval_term_direct(f.rhs(), m, env);
    case ExprKind::Not:
      return !eval_modal_rec(f.body(), m, w, style, env);
    case ExprKind::Binary: {
      bool l = eval_modal_rec(f.lhs(), m, w, style, env);
      switch (f.op()) {
        case BinOp::And: return l && eval_modal_rec(f.rhs(), m, w, style, env);
        case BinOp::Or: return l || eval_modal_rec(f.rhs(), m, w, style, env);
        case BinOp::Implies: return !l || eval_modal_rec(f.rhs(), m, w, style, env);
        case BinOp::ImpliedBy: return l || !eval_modal_rec(f.rhs(), m, w, style, env);
        case BinOp::Iff: return l == eval_modal_rec(f.rhs(), m, w, style, env);
        case BinOp::Xor: return l != eval_modal_rec(f.rhs(), m, w, style, env);
      }
      return false;
    }
    case ExprKind::Quant: {
      const Type& ty = f.bound_type();
      if (!ty.is_base() || ty.name() == "$o")
        throw ToolError(ErrorCode::UnsupportedFragment,
                        "only individual quantification is supported by the oracle");
      bool forall = f.quant_kind() == QuantKind::Forall;
      for (int d = 0; d < m.carrier; d++) {
        if (style != DomainSemantics::Constant && !m.in_domain(w, d)) continue;
        env.vars.emplace_back(f.bound_var(), d);
        bool r = eval_modal_rec(f.body(), m, w, style, env);
        env.vars.pop_back();
        if (forall && !r) return false;
        if (!forall && r) return true;
      }
      return forall;
    }
    case ExprKind::Modal: {
      std::string idx = f.modal_index().value_or("");
      auto it = m.relations.find(idx);
      if (it == m.relations.end())
        throw ToolError(ErrorCode::UnassignedSymbol, "no relation for modal index");
      bool box = f.modal_op() == ModalOp::Box;
      for (int v = 0; v < m.worlds; v++) {
        if (!it->second[static_cast<size_t>(w) * m.worlds + v]) continue;
        bool r = eval_modal_rec(f.body(), m, v, style, env);
        if (box && !r) return false;
        if (!box && r) return true;
      }
      return box;
    }
    case ExprKind::NclApp:
      throw ToolError(ErrorCode::UnhandledConnective,
                      "connective '{" + f.name() + "}' has no Kripke semantics here");
    case ExprKind::Var:
      throw ToolError(ErrorCode::UnsupportedFragment,
                      "boolean variables are outside the oracle fragment");
    case ExprKind::Lambda:
    case ExprKind::Apply:
      throw ToolError(ErrorCode::StageMismatch, "eval_modal expects a source-stage formula");
  }
  return false;
}

}  // namespace

bool eval_modal(const Expr& f, const KripkeModel& model, int world, DomainSemantics quant_style) {
  ModalEnv env;
  return eval_modal_rec(f, model, world, quant_style, env);
}

// ---------------------------------------------------------------------------
// Finite higher-order evaluation

long long Interp::size_of(const Type& t) const {
  if (t.is_base()) {
    if (t.name() == "$o") return 2;
    auto it = type_sizes.find(t.name());
    if (it == type_sizes.end())
      throw ToolError(ErrorCode::UnassignedSymbol, "no carrier for type " + t.name());
    return it->second;
  }
  long long dom = size_of(t.from());
  long long cod = size_of(t.to());
  long long r = 1;
  for (long long i = 0; i < dom; i++) {
    r *= cod;
    if (r > kFnSpaceCeiling)
      throw ToolError(ErrorCode::BoundsTooLarge, "function space too large to enumerate");
  }
  return r;
}

Val make_fn(const Interp& interp, const Type& type,
            const std::function<Val(long long)>& result) {
  auto fn = std::make_shared<FnVal>();
  fn->type = type;
  fn->arg_size = interp.size_of(type.from());
  fn->table.reserve(fn->arg_size);
  for (long long i = 0; i < fn->arg_size; i++) fn->table.push_back(result(i));
  Val v;
  v.fn = std::move(fn);
  return v;
}

long long value_index(const Val& v, const Type& type, const Interp& interp) {
  if (!v.is_fn()) return v.scalar;
  long long cod = interp.size_of(type.to());
  long long index = 0, mult = 1;
  for (const Val& entry : v.fn->table) {
    index += value_index(entry, type.to(), interp) * mult;
    mult *= cod;
  }
  return index;
}

Val value_from_index(long long index, const Type& type, const Interp& interp) {
  if (type.is_base()) {
    Val v;
    v.scalar = index;
    return v;
  }
  long long cod = interp.size_of(type.to());
  return make_fn(interp, type, [&](long long i) {
    long long digit = (index / ipow(cod, i)) % cod;
    return value_from_index(digit, type.to(), interp);
  });
}

namespace {

struct HolEnv {
  std::vector<std::pair<std::string, std::pair<Val, Type>>> vars;

  const std::pair<Val, Type>* lookup(const std::string& name) const {
    for (auto it = vars.rbegin(); it != vars.rend(); ++it)
      if (it->first == name) return &it->second;
    return nullptr;
  }
};

Val eval_value(const Expr& f, const Interp& in, HolEnv& env);

bool eval_bool(const Expr& f, const Interp& in, HolEnv& env) {
  Val v = eval_value(f, in, env);
  if (v.is_fn()) throw ToolError(ErrorCode::TypeError, "expected a boolean value");
  return v.scalar != 0;
}

bool vals_equal(const Val& a, const Val& b, const Interp& in) {
  if (a.is_fn() != b.is_fn()) return false;
  if (!a.is_fn()) return a.scalar == b.scalar;
  return value_index(a, a.fn->type, in) == value_index(b, b.fn->type, in);
}

Val apply_val(const Val& fun, const Val& arg, const Interp& in) {
  if (!fun.is_fn()) throw ToolError(ErrorCode::TypeError, "application of a non-function");
  long long idx = value_index(arg, fun.fn->type.from(), in);
  return fun.fn->table[static_cast<size_t>(idx)];
}

Val eval_value(const Expr& f, const Interp& in, HolEnv& env) {
  switch (f.kind()) {
    case ExprKind::Var: {
      if (const auto* bound = env.lookup(f.name())) return bound->first;
      throw ToolError(ErrorCode::UnassignedSymbol, "unbound variable '" + f.name() + "'");
    }
    case ExprKind::Const: {
      auto it = in.symbols.find(f.name());
      if (it == in.symbols.end())
        throw ToolError(ErrorCode::UnassignedSymbol, "no interpretation for '" + f.name() + "'");
      return it->second;
    }
    case ExprKind::App: {
      auto it = in.symbols.find(f.name());
      if (it == in.symbols.end())
        throw ToolError(ErrorCode::UnassignedSymbol, "no interpretation for '" + f.name() + "'");
      Val v = it->second;
      for (const Expr& a : f.args()) v = apply_val(v, eval_value(a, in, env), in);
      return v;
    }
    case ExprKind::Truth: {
      Val v;
      v.scalar = f.truth_value() ? 1 : 0;
      return v;
    }
    case ExprKind::Eq: {
      Val l = eval_value(f.lhs(), in, env);
      Val r = eval_value(f.rhs(), in, env);
      Val v;
      v.scalar = vals_equal(l, r, in) ? 1 : 0;
      return v;
    }
    case ExprKind::Not: {
      Val v;
      v.scalar = eval_bool(f.body(), in, env) ? 0 : 1;
      return v;
    }
    case ExprKind::Binary: {
      bool l = eval_bool(f.lhs(), in, env);
      bool r;
      switch (f.op()) {  // short-circuit where possible
        case BinOp::And:
          r = l && eval_bool(f.rhs(), in, env);
          break;
        case BinOp::Or:
          r = l || eval_bool(f.rhs(), in, env);
          break;
        case BinOp::Implies:
          r = !l || eval_bool(f.rhs(), in, env);
          break;
        case BinOp::ImpliedBy:
          r = l || !eval_bool(f.rhs(), in, env);
          break;
        case BinOp::Iff:
          r = l == eval_bool(f.rhs(), in, env);
          break;
        case BinOp::Xor:
          r = l != eval_bool(f.rhs(), in, env);
          break;
        default:
          r = false;
      }
      Val v;
      v.scalar = r ? 1 : 0;
      return v;
    }
    case ExprKind::Quant: {
      long long size = in.size_of(f.bound_type());
      bool forall = f.quant_kind() == QuantKind::Forall;
      for (long long i = 0; i < size; i++) {
        env.vars.push_back({f.bound_var(), {value_from_index(i, f.bound_type(), in),
                                            f.bound_type()}});
        bool r = eval_bool(f.body(), in, env);
        env.vars.pop_back();
        if (forall && !r) return Val{0, nullptr};
        if (!forall && r) return Val{1, nullptr};
      }
      return Val{forall ? 1 : 0, nullptr};
    }
    case ExprKind::Lambda: {
      // Materialize the (finite) function table.
      HolEnv* envp = &env;
      Type fn_type = Type::fun(f.bound_type(), types::boolean());
      // The body type is not tracked here; result values self-describe.
      auto fnv = std::make_shared<FnVal>();
      fnv->arg_size = in.size_of(f.bound_type());
      Type body_type;  // resolved below from first entry when functional
      for (long long i = 0; i < fnv->arg_size; i++) {
        envp->vars.push_back({f.bound_var(), {value_from_index(i, f.bound_type(), in),
                                              f.bound_type()}});
        Val r = eval_value(f.body(), in, *envp);
        envp->vars.pop_back();
        if (r.is_fn() && !body_type.valid()) body_type = r.fn->type;
        fnv->table.push_back(std::move(r));
      }
      fnv->type = Type::fun(f.bound_type(), body_type.valid() ? body_type : types::boolean());
      Val v;
      v.fn = std::move(fnv);
      return v;
    }
    case ExprKind::Apply: {
      if (f.fun().kind() == ExprKind::Lambda) {
        // beta fast path: bind directly instead of materializing the table
        const Expr& lam = f.fun();
        Val arg = eval_value(f.arg(), in, env);
        env.vars.push_back({lam.bound_var(), {std::move(arg), lam.bound_type()}});
        Val r = eval_value(lam.body(), in, env);
        env.vars.pop_back();
        return r;
      }
      Val fun = eval_value(f.fun(), in, env);
      Val arg = eval_value(f.arg(), in, env);
      return apply_val(fun, arg, in);
    }
    case ExprKind::Modal:
    case ExprKind::NclApp:
      throw ToolError(ErrorCode::StageMismatch, "eval_hol expects a target-stage formula");
  }
  throw ToolError(ErrorCode::Internal, "unknown expression kind");
}

}  // namespace

bool eval_hol(const Expr& f, const Interp& interp) {
  HolEnv env;
  Val v = eval_value(f, interp, env);
  if (v.is_fn()) throw ToolError(ErrorCode::TypeError, "formula did not evaluate to a boolean");
  return v.scalar != 0;
}

Interp induced_interp(const KripkeModel& model, const EmbeddingPlan& plan,
                      const Signature& signature, int world) {
  Interp in;
  in.type_sizes[plan.world_type] = model.worlds;
  in.type_sizes["$i"] = model.carrier;
  for (const auto& [type_name, sem] : plan.domain_plan) {
    (void)sem;
    in.type_sizes[type_name] = model.carrier;
  }

  Type mu = Type::base(plan.world_type);
  Type o = types::boolean();

  Val w0;
  w0.scalar = world;
  in.symbols[plan.current_world] = w0;

  for (const auto& [idx, rel_name] : plan.rel_names) {
    const std::string& index = idx;
    Type rel_t = Type::fun(mu, Type::fun(mu, o));
    in.symbols[rel_name] = make_fn(in, rel_t, [&](long long w) {
      return make_fn(in, rel_t.to(), [&](long long v) {
        Val r;
        r.scalar = model.rel(index, static_cast<int>(w), static_cast<int>(v)) ? 1 : 0;
        return r;
      });
    });
  }

  for (const auto& [type_name, eiw_name] : plan.eiw_names) {
    Type eiw_t = Type::fun(Type::base(type_name), Type::fun(mu, o));
    in.symbols[eiw_name] = make_fn(in, eiw_t, [&](long long d) {
      return make_fn(in, eiw_t.to(), [&](long long w) {
        Val r;
        r.scalar = model.in_domain(static_cast<int>(w), static_cast<int>(d)) ? 1 : 0;
        return r;
      });
    });
  }

  for (const auto& [name, pred] : model.predicates) {
    const Type* declared = signature.lookup(name);
    (void)declared;
    // lifted type: $i > ... > $i > mu > $o
    std::vector<Type> args(static_cast<size_t>(pred.arity), types::individual());
    Type lifted = Type::fun(args, Type::fun(mu, o));
    long long tuples = ipow(model.carrier, pred.arity);
    std::function<Val(int, long long, const Type&)> build = [&](int depth, long long tuple,
                                                                const Type& t) -> Val {
      if (depth == pred.arity) {
        return make_fn(in, t, [&](long long w) {
          Val r;
          r.scalar = pred.table[static_cast<size_t>(w) * tuples + tuple] ? 1 : 0;
          return r;
        });
      }
      long long mult = ipow(model.carrier, depth);
      return make_fn(in, t, [&](long long d) {
        return build(depth + 1, tuple + d * mult, t.to());
      });
    };
    in.symbols[name] = build(0, 0, lifted);
  }

  for (const auto& [name, c] : model.constants) {
    Val v;
    v.scalar = c;
    in.symbols[name] = v;
  }

  for (const auto& [name, func] : model.functions) {
    std::vector<Type> args(static_cast<size_t>(func.arity), types::individual());
    Type ft = Type::fun(args, types::individual());
    long long mults = 1;
    std::function<Val(int, long long, const Type&, long long)> build =
        [&](int depth, long long tuple, const Type& t, long long mult) -> Val {
      if (depth == func.arity) {
        Val r;
        r.scalar = func.table[tuple];
        return r;
      }
      return make_fn(in, t, [&](long long d) {
        return build(depth + 1, tuple + d * mult, t.is_fun() ? t.to() : t, mult * model.carrier);
      });
    };
    (void)mults;
    in.symbols[name] = build(0, 0, ft, 1);
  }

  return in;
}

// ---------------------------------------------------------------------------
// Enumeration

void for_each_model(const OracleSignature& sig, int worlds, int carrier,
                    const std::map<std::string, std::set<FrameCondition>>& frame,
                    DomainSemantics discipline, bool local_terms,
                    const std::function<bool(const KripkeModel&, long long)>& cb,
                    long long& ordinal, int stride, int offset) {
  const int n = worlds;
  KripkeModel m;
  m.worlds = n;
  m.carrier = carrier;

  std::vector<std::string> enumerated;  // indices with an enumerated relation
  long long rel_bits = 0;
  for (const std::string& idx : sig.indices) {
    auto it = frame.find(idx);
    bool universal = it != frame.end() && it->second.count(FrameCondition::Universal);
    m.relations[idx].assign(static_cast<size_t>(n) * n, universal ? 1 : 0);
    if (!universal) {
      enumerated.push_back(idx);
      rel_bits += n * n;
    }
  }

  bool const_dom = discipline == DomainSemantics::Constant;
  int subset_count = (1 << carrier) - 1;
  long long dom_space = 1;
  if (!const_dom)
    for (int w = 0; w < n; w++) dom_space *= subset_count;
  m.domain.assign(static_cast<size_t>(n) * carrier, 1);

  long long const_space = ipow(carrier, static_cast<long long>(sig.constants.size()));
  for (const std::string& c : sig.constants) m.constants[c] = 0;

  long long val_bits = 0;
  for (const auto& [name, arity] : sig.predicates) {
    long long bits = n * ipow(carrier, arity);
    m.predicates[name] = KripkeModel::Pred{arity,
                                           std::vector<uint8_t>(static_cast<size_t>(bits), 0)};
    val_bits += bits;
  }

  if (rel_bits + val_bits > kEnumBitsCeiling)
    throw ToolError(ErrorCode::BoundsTooLarge, "model space too large to enumerate");

  long long rel_space = 1ll << rel_bits;
  long long val_space = 1ll << val_bits;

  auto frame_ok = [&](const std::string& idx) {
    auto it = frame.find(idx);
    if (it == frame.end()) return true;
    const std::vector<uint8_t>& r = m.relations[idx];
    auto at = [&](int a, int b) { return r[static_cast<size_t>(a) * n + b] != 0; };
    for (FrameCondition c : it->second) {
      switch (c) {
        case FrameCondition::Universal:
          break;  // fixed above
        case FrameCondition::Serial:
          for (int w = 0; w < n; w++) {
            bool any = false;
            for (int v = 0; v < n && !any; v++) any = at(w, v);
            if (!any) return false;
          }
          break;
        case FrameCondition::Reflexive:
          for (int w = 0; w < n; w++)
            if (!at(w, w)) return false;
          break;
        case FrameCondition::Symmetric:
          for (int w = 0; w < n; w++)
            for (int v = 0; v < n; v++)
              if (at(w, v) != at(v, w)) return false;
          break;
        case FrameCondition::Transitive:
          for (int w = 0; w < n; w++)
            for (int v = 0; v < n; v++)
              if (at(w, v))
                for (int u = 0; u < n; u++)
                  if (at(v, u) && !at(w, u)) return false;
          break;
        case FrameCondition::Euclidean:
          for (int w = 0; w < n; w++)
            for (int v = 0; v < n; v++)
              if (at(w, v))
                for (int u = 0; u < n; u++)
                  if (at(w, u) && !at(v, u)) return false;
          break;
      }
    }
    return true;
  };

  auto discipline_ok = [&]() {
    if (const_dom || discipline == DomainSemantics::Varying) return true;
    for (const auto& [idx, r] : m.relations) {
      (void)idx;
      for (int w = 0; w < n; w++)
        for (int v = 0; v < n; v++) {
          if (!r[static_cast<size_t>(w) * n + v]) continue;
          for (int d = 0; d < carrier; d++) {
            bool dw = m.in_domain(w, d), dv = m.in_domain(v, d);
            if (discipline == DomainSemantics::Cumulative && dw && !dv) return false;
            if (discipline == DomainSemantics::Decreasing && dv && !dw) return false;
          }
        }
    }
    return true;
  };

  for (long long rc = 0; rc < rel_space; rc++) {
    long long bits = rc;
    for (const std::string& idx : enumerated) {
      std::vector<uint8_t>& r = m.relations[idx];
      for (int i = 0; i < n * n; i++) {
        r[i] = bits & 1;
        bits >>= 1;
      }
    }
    bool frames_ok = true;
    for (const std::string& idx : sig.indices) frames_ok = frames_ok && frame_ok(idx);
    if (!frames_ok) continue;

    for (long long dc = 0; dc < dom_space; dc++) {
      if (!const_dom) {
        long long d = dc;
        for (int w = 0; w < n; w++) {
          int mask = static_cast<int>(d % subset_count) + 1;  // nonempty subsets
          d /= subset_count;
          for (int e = 0; e < carrier; e++)
            m.domain[static_cast<size_t>(w) * carrier + e] = (mask >> e) & 1;
        }
      }
      if (!discipline_ok()) continue;

      for (long long cc = 0; cc < const_space; cc++) {
        long long c = cc;
        bool consts_ok = true;
        for (const std::string& name : sig.constants) {
          int value = static_cast<int>(c % carrier);
          c /= carrier;
          m.constants[name] = value;
          if (local_terms)
            for (int w = 0; w < n && consts_ok; w++) consts_ok = m.in_domain(w, value);
        }
        if (!consts_ok) continue;

        for (long long vc = 0; vc < val_space; vc++) {
          long long v = vc;
          for (auto& [name, pred] : m.predicates) {
            (void)name;
            for (auto& bit : pred.table) {
              bit = v & 1;
              v >>= 1;
            }
          }
          long long my = ordinal++;
          if (my % stride == offset) {
            if (!cb(m, my)) return;
          }
        }
      }
    }
  }
}

namespace {

void check_ceiling(const OracleBounds& bounds, const OracleSignature& sig) {
  if (bounds.force) return;
  if (bounds.max_worlds > 4 || bounds.max_domain > 2)
    throw ToolError(ErrorCode::BoundsTooLarge,
                    "bounds exceed the practical ceiling (4 worlds, 2 domain elements); "
                    "use force to override");
  if (sig.predicates.size() > 2 || sig.constants.size() > 1 || sig.indices.size() > 1)
    throw ToolError(ErrorCode::BoundsTooLarge,
                    "signature exceeds the practical ceiling (2 predicates, 1 constant, "
                    "1 modality); use force to override");
}

std::map<std::string, std::set<FrameCondition>> uniform_frame(const OracleSignature& sig,
                                                              const std::set<FrameCondition>& f) {
  std::map<std::string, std::set<FrameCondition>> out;
  for (const std::string& idx : sig.indices) out[idx] = f;
  return out;
}

}  // namespace

std::vector<KripkeModel> enumerate_models(const OracleSignature& sig, const OracleBounds& bounds,
                                          const std::set<FrameCondition>& frame,
                                          DomainSemantics discipline, bool local_terms,
                                          bool exact_worlds) {
  check_ceiling(bounds, sig);
  for (const auto& [name, arity] : sig.predicates) {
    (void)name;
    if (arity > 2 && !bounds.force)
      throw ToolError(ErrorCode::BoundsTooLarge, "predicate arity above ceiling");
  }
  std::vector<KripkeModel> out;
  long long ordinal = 0;
  auto keep = [&](const KripkeModel& m, long long) {
    out.push_back(m);
    return true;
  };
  auto frames = uniform_frame(sig, frame);
  if (exact_worlds) {
    for_each_model(sig, bounds.max_worlds, bounds.max_domain, frames, discipline, local_terms,
                   keep, ordinal);
  } else {
    for (int w = 1; w <= bounds.max_worlds; w++)
      for_each_model(sig, w, bounds.max_domain, frames, discipline, local_terms, keep, ordinal);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Fragment extraction

namespace {

struct Fragment {
  OracleSignature sig;
  Signature types;        // inferred symbol types
  bool has_individuals = false;
};

Fragment extract_fragment(const std::vector<std::pair<std::string, Expr>>& formulas,
                          bool force) {
  Problem p;
  for (const auto& [name, f] : formulas) {
    AnnotatedFormula af;
    af.keyword = FormKeyword::Tff;
    af.name = name;
    af.role = Role{RoleBase::Axiom, std::nullopt};
    af.content = f;
    p.formulas.push_back(std::move(af));
  }
  p = infer_signature(p);

  Fragment frag;
  frag.types = p.signature;
  for (const auto& [sym, type] : p.signature.entries()) {
    if (type.result().is_base("$o")) {
      int arity = type.arity();
      if (arity >= 2)
        throw ToolError(ErrorCode::UnsupportedFragment,
                        "predicate '" + sym + "' has arity " + std::to_string(arity) +
                            "; the oracle fragment is monadic");
      for (const Type& a : type.args())
        if (!a.is_base("$i"))
          throw ToolError(ErrorCode::UnsupportedFragment,
                          "predicate arguments must have type $i");
      frag.sig.predicates.emplace_back(sym, arity);
      if (arity > 0) frag.has_individuals = true;
    } else if (type.is_base("$i")) {
      frag.sig.constants.push_back(sym);
      frag.has_individuals = true;
    } else {
      throw ToolError(ErrorCode::UnsupportedFragment,
                      "symbol '" + sym + "' of type " + type.show() +
                          " is outside the oracle fragment");
    }
  }

  std::set<std::string> indices;
  std::function<void(const Expr&)> scan = [&](const Expr& f) {
    switch (f.kind()) {
      case ExprKind::Modal:
        indices.insert(f.modal_index().value_or(""));
        scan(f.body());
        break;
      case ExprKind::Quant: {
        const Type& t = f.bound_type();
        if (!t.is_base("$i"))
          throw ToolError(ErrorCode::UnsupportedFragment,
                          "quantification outside $i is not in the oracle fragment");
        frag.has_individuals = true;
        scan(f.body());
        break;
      }
      case ExprKind::Not:
        scan(f.body());
        break;
      case ExprKind::Binary:
      case ExprKind::Eq:
        scan(f.args()[0]);
        scan(f.args()[1]);
        if (f.kind() == ExprKind::Eq) frag.has_individuals = true;
        break;
      case ExprKind::App:
        for (const Expr& a : f.args()) scan(a);
        break;
      case ExprKind::NclApp:
        throw ToolError(ErrorCode::UnhandledConnective,
                        "non-modal connectives are outside the oracle fragment");
      case ExprKind::Lambda:
      case ExprKind::Apply:
        throw ToolError(ErrorCode::UnsupportedFragment,
                        "higher-order constructs are outside the oracle fragment");
      default:
        break;
    }
  };
  for (const auto& [name, f] : formulas) {
    (void)name;
    scan(f);
  }
  if (indices.size() > 1 && !force)
    throw ToolError(ErrorCode::UnsupportedFragment,
                    "multi-modal formulas are outside the oracle fragment");
  for (const std::string& idx : indices) frag.sig.indices.push_back(idx);
  return frag;
}

}  // namespace

// ---------------------------------------------------------------------------
// Cross-checking

CheckReport cross_check(const std::vector<std::pair<std::string, Expr>>& formulas,
                        const LogicSpec& spec, const OracleBounds& bounds,
                        const EmbedOptions& embed, int workers) {
  Fragment frag = extract_fragment(formulas, bounds.force);
  check_ceiling(bounds, frag.sig);

  // Problem context for planning/embedding.
  Problem context;
  for (const auto& [name, f] : formulas) {
    AnnotatedFormula af;
    af.keyword = FormKeyword::Tff;
    af.name = name;
    af.role = Role{RoleBase::Axiom, std::nullopt};
    af.content = f;
    context.formulas.push_back(std::move(af));
  }
  context.signature = frag.types;

  EmbeddingPlan pl = plan(context, spec, embed);
  Expr w0 = Expr::constant(pl.current_world);
  std::vector<Expr> embedded;
  embedded.reserve(formulas.size());
  for (const auto& [name, f] : formulas) {
    (void)name;
    embedded.push_back(embed_formula_at(f, pl, context.signature, w0));
  }

  // Under the universal-relation rewrite agreement holds on universal
  // frames (the guard is gone); otherwise on the spec's frame class.
  std::map<std::string, std::set<FrameCondition>> frames;
  for (const std::string& idx : frag.sig.indices) {
    frames[idx] = pl.s5u ? std::set<FrameCondition>{FrameCondition::Universal}
                         : frame_conditions(spec.modalities.schemes_for(idx));
  }

  DomainSemantics discipline = spec.domains_for("$i");
  if (pl.s5_domain_collapse &&
      (discipline == DomainSemantics::Cumulative || discipline == DomainSemantics::Decreasing))
    discipline = DomainSemantics::Constant;
  int carrier = frag.has_individuals ? bounds.max_domain : 1;

  struct Acc {
    long long points = 0;
    long long mismatches = 0;
    long long best_mis = -1;
    KripkeModel mis_model;
    int mis_world = 0;
    bool mis_direct = false;
    long long best_cex = -1;
    KripkeModel cex_model;
    int cex_world = 0;
  };

  int nworkers = workers > 0 ? workers
                             : std::max(1u, std::thread::hardware_concurrency());
  std::vector<std::vector<Acc>> accs(static_cast<size_t>(nworkers),
                                     std::vector<Acc>(formulas.size()));
  std::vector<long long> models_seen(static_cast<size_t>(nworkers), 0);

  auto work = [&](int id) {
    std::vector<Acc>& acc = accs[static_cast<size_t>(id)];
    long long ordinal = 0;
    auto visit = [&](const KripkeModel& model, long long my) {
      models_seen[static_cast<size_t>(id)]++;
      Interp interp = induced_interp(model, pl, context.signature, 0);
      for (int w = 0; w < model.worlds; w++) {
        interp.symbols[pl.current_world].scalar = w;
        for (size_t i = 0; i < formulas.size(); i++) {
          bool direct = eval_modal(formulas[i].second, model, w, discipline);
          bool emb = eval_hol(embedded[i], interp);
          Acc& a = acc[i];
          a.points++;
          if (direct != emb) {
            a.mismatches++;
            if (a.best_mis < 0 || my < a.best_mis ||
                (my == a.best_mis && w < a.mis_world)) {
              a.best_mis = my;
              a.mis_model = model;
              a.mis_world = w;
              a.mis_direct = direct;
            }
          }
          if (!direct && (a.best_cex < 0 || my < a.best_cex ||
                          (my == a.best_cex && w < a.cex_world))) {
            a.best_cex = my;
            a.cex_model = model;
            a.cex_world = w;
          }
        }
      }
      return true;
    };
    for (int n = 1; n <= bounds.max_worlds; n++)
      for_each_model(frag.sig, n, carrier, frames, discipline, /*local_terms=*/true, visit,
                     ordinal, nworkers, id);
  };

  if (nworkers == 1) {
    work(0);
  } else {
    std::vector<std::thread> threads;
    for (int i = 0; i < nworkers; i++) threads.emplace_back(work, i);
    for (auto& t : threads) t.join();
  }

  CheckReport report;
  for (long long seen : models_seen) report.models += seen;
  for (size_t i = 0; i < formulas.size(); i++) {
    FormulaCheck fc;
    fc.name = formulas[i].first;
    fc.text = print_formula(formulas[i].second, PrintStyle::Nxf);
    long long best_mis = -1, best_cex = -1;
    for (int t = 0; t < nworkers; t++) {
      const Acc& a = accs[static_cast<size_t>(t)][i];
      fc.points += a.points;
      fc.mismatches += a.mismatches;
      if (a.best_mis >= 0 && (best_mis < 0 || a.best_mis < best_mis ||
                              (a.best_mis == best_mis && a.mis_world < fc.first_mismatch->world))) {
        best_mis = a.best_mis;
        fc.first_mismatch = ModelWitness{a.mis_model, a.mis_world};
        fc.first_mismatch_direct = a.mis_direct;
      }
      if (a.best_cex >= 0 && (best_cex < 0 || a.best_cex < best_cex ||
                              (a.best_cex == best_cex && a.cex_world < fc.countermodel->world))) {
        best_cex = a.best_cex;
        fc.countermodel = ModelWitness{a.cex_model, a.cex_world};
      }
    }
    fc.valid = !fc.countermodel.has_value();
    report.formulas.push_back(std::move(fc));
  }
  return report;
}

ValidityResult check_validity(const Expr& f, const std::set<FrameCondition>& frame,
                              DomainSemantics discipline, const OracleBounds& bounds,
                              int workers) {
  (void)workers;
  Fragment frag = extract_fragment({{"f", f}}, bounds.force);
  check_ceiling(bounds, frag.sig);
  int carrier = frag.has_individuals ? bounds.max_domain : 1;
  auto frames = uniform_frame(frag.sig, frame);

  ValidityResult result;
  long long ordinal = 0;
  auto visit = [&](const KripkeModel& model, long long) {
    result.models++;
    for (int w = 0; w < model.worlds; w++) {
      if (!eval_modal(f, model, w, discipline)) {
        result.valid = false;
        result.countermodel = ModelWitness{model, w};
        return false;
      }
    }
    return true;
  };
  for (int n = 1; n <= bounds.max_worlds && result.valid; n++)
    for_each_model(frag.sig, n, carrier, frames, discipline, /*local_terms=*/true, visit,
                   ordinal);
  return result;
}

ValidityResult check_validity_hol(const Expr& f, const LogicSpec& spec,
                                  const EmbedOptions& embed, const OracleBounds& bounds,
                                  const std::optional<std::set<FrameCondition>>& frame_override,
                                  int workers) {
  (void)workers;
  Fragment frag = extract_fragment({{"f", f}}, bounds.force);
  check_ceiling(bounds, frag.sig);

  Problem context;
  {
    AnnotatedFormula af;
    af.keyword = FormKeyword::Tff;
    af.name = "f";
    af.role = Role{RoleBase::Axiom, std::nullopt};
    af.content = f;
    context.formulas.push_back(std::move(af));
    context.signature = frag.types;
  }
  EmbeddingPlan pl = plan(context, spec, embed);
  Expr embedded = embed_formula_at(f, pl, context.signature, Expr::constant(pl.current_world));

  std::map<std::string, std::set<FrameCondition>> frames;
  for (const std::string& idx : frag.sig.indices) {
    if (frame_override) frames[idx] = *frame_override;
    else if (pl.s5u) frames[idx] = {FrameCondition::Universal};
    else frames[idx] = frame_conditions(spec.modalities.schemes_for(idx));
  }

  DomainSemantics discipline = spec.domains_for("$i");
  if (pl.s5_domain_collapse &&
      (discipline == DomainSemantics::Cumulative || discipline == DomainSemantics::Decreasing))
    discipline = DomainSemantics::Constant;
  int carrier = frag.has_individuals ? bounds.max_domain : 1;

  ValidityResult result;
  long long ordinal = 0;
  auto visit = [&](const KripkeModel& model, long long) {
    result.models++;
    Interp interp = induced_interp(model, pl, context.signature, 0);
    for (int w = 0; w < model.worlds; w++) {
      interp.symbols[pl.current_world].scalar = w;
      if (!eval_hol(embedded, interp)) {
        result.valid = false;
        result.countermodel = ModelWitness{model, w};
        return false;
      }
    }
    return true;
  };
  for (int n = 1; n <= bounds.max_worlds && result.valid; n++)
    for_each_model(frag.sig, n, carrier, frames, discipline, /*local_terms=*/true, visit,
                   ordinal);
  return result;
}

// ---------------------------------------------------------------------------
// Reports

std::string render_report_text(const CheckReport& report) {
  std::ostringstream out;
  out << "oracle cross-check: " << report.formulas.size() << " formula(s), " << report.models
      << " model(s), " << report.total_mismatches() << " mismatch(es)\n";
  for (const auto& fc : report.formulas) {
    out << "  " << fc.name << ": " << fc.text << "\n";
    out << "    points=" << fc.points << " mismatches=" << fc.mismatches;
    if (fc.first_mismatch) {
      out << "\n    first mismatch at world " << fc.first_mismatch->world << " of "
          << fc.first_mismatch->model.describe() << " (direct="
          << (fc.first_mismatch_direct ? "true" : "false") << ")";
    }
    if (fc.valid) {
      out << "\n    valid on all checked models";
    } else if (fc.countermodel) {
      out << "\n    countermodel at world " << fc.countermodel->world << " of "
          << fc.countermodel->model.describe();
    }
    out << "\n";
  }
  return out.str();
}

std::string render_report_json(const CheckReport& report) {
  nlohmann::json j;
  j["formulas"] = report.formulas.size();
  j["models"] = report.models;
  j["mismatches"] = report.total_mismatches();
  nlohmann::json per = nlohmann::json::array();
  for (const auto& fc : report.formulas) {
    nlohmann::json e;
    e["name"] = fc.name;
    e["points"] = fc.points;
    e["mismatches"] = fc.mismatches;
    e["valid"] = fc.valid;
    if (fc.first_mismatch) e["first_mismatch"] = fc.first_mismatch->model.describe();
    if (fc.countermodel) {
      e["countermodel"] = fc.countermodel->model.describe();
      e["countermodel_world"] = fc.countermodel->world;
    }
    per.push_back(std::move(e));
  }
  j["results"] = std::move(per);
  return j.dump();
}

}  // namespace modalkit
