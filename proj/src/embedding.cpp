#include "modalkit/embedding.hpp"

#include <algorithm>
#include <functional>

namespace modalkit {

namespace {

std::string fresh_symbol(const std::string& base, const std::set<std::string>& avoid) {
  if (!avoid.count(base)) return base;
  for (int i = 1;; i++) {
    std::string cand = base + std::to_string(i);
    if (!avoid.count(cand)) return cand;
  }
}

std::string type_suffix(const std::string& type_name) {
  if (type_name == "$i") return "";
  if (type_name == "$o") return "_o";
  return "_" + type_name;
}

void collect_var_names(const Expr& f, std::set<std::string>& out) {
  switch (f.kind()) {
    case ExprKind::Var:
      out.insert(f.name());
      return;
    case ExprKind::Const:
    case ExprKind::Truth:
      return;
    case ExprKind::App:
    case ExprKind::NclApp:
      for (const Expr& a : f.args()) collect_var_names(a, out);
      return;
    case ExprKind::Eq:
    case ExprKind::Binary:
    case ExprKind::Apply:
      collect_var_names(f.args()[0], out);
      collect_var_names(f.args()[1], out);
      return;
    case ExprKind::Not:
    case ExprKind::Modal:
      collect_var_names(f.body(), out);
      return;
    case ExprKind::Quant:
    case ExprKind::Lambda:
      out.insert(f.bound_var());
      collect_var_names(f.body(), out);
      return;
  }
}

}  // namespace

EmbeddingPlan plan(const Problem& problem, const LogicSpec& spec, const EmbedOptions& options) {
  if (spec.designation == Designation::Flexible)
    throw ToolError(ErrorCode::UnsupportedFeature,
                    "flexible designation is not supported by the embedding");

  EmbeddingPlan plan;
  plan.defs = options.defs;

  std::set<std::string> avoid;
  for (const auto& [name, type] : problem.signature.entries()) {
    (void)type;
    avoid.insert(name);
  }
  for (const std::string& t : collect_individual_types(problem)) avoid.insert(t);

  auto reserve = [&](const std::string& base) {
    std::string name = fresh_symbol(base, avoid);
    avoid.insert(name);
    return name;
  };

  plan.world_type = reserve("emb__world");
  plan.lifted_bool = reserve("emb__sigma");
  plan.current_world = reserve("emb__w0");

  plan.indices = collect_modal_indices(problem);

  // The optimizations apply only when every modality in play is S5.
  bool all_s5 = true;
  if (plan.indices.empty()) {
    all_s5 = schemes_entail_equivalence(spec.modalities.default_schemes);
  } else {
    for (const std::string& idx : plan.indices)
      all_s5 = all_s5 && schemes_entail_equivalence(spec.modalities.schemes_for(idx));
  }
  plan.s5u = options.s5u && all_s5;

  for (const std::string& idx : plan.indices) {
    if (plan.s5u) {
      plan.frame_axioms[idx] = {FrameCondition::Universal};
      continue;
    }
    plan.rel_names[idx] = reserve(idx.empty() ? "emb__rel" : "emb__rel_" + idx);
    plan.frame_axioms[idx] = frame_conditions(spec.modalities.schemes_for(idx));
  }

  bool any_collapsible = false;
  std::vector<std::string> ind_types = collect_individual_types(problem);
  for (const std::string& t : ind_types) {
    DomainSemantics d = spec.domains_for(t);
    if (d == DomainSemantics::Cumulative || d == DomainSemantics::Decreasing)
      any_collapsible = true;
  }
  plan.s5_domain_collapse = options.s5_collapse && all_s5 && any_collapsible;

  for (const std::string& t : ind_types) {
    DomainSemantics d = spec.domains_for(t);
    if (plan.s5_domain_collapse &&
        (d == DomainSemantics::Cumulative || d == DomainSemantics::Decreasing))
      d = DomainSemantics::Constant;
    plan.domain_plan[t] = d;
    if (d != DomainSemantics::Constant) {
      plan.eiw_types.push_back(t);
      plan.eiw_names[t] = reserve("emb__eiw" + type_suffix(t));
    }
  }
  return plan;
}

Type lift_type(const Type& t, const EmbeddingPlan& plan) {
  if (t.is_base())
    return t.name() == "$o" ? Type::fun(Type::base(plan.world_type), types::boolean()) : t;
  return Type::fun(lift_type(t.from(), plan), lift_type(t.to(), plan));
}

// ---------------------------------------------------------------------------
// Embedder

namespace {

std::string def_symbol(const Signature& sig, const std::string& short_name) {
  std::string base = "emb__" + short_name;
  std::string name = base;
  for (int i = 1; sig.lookup(name) != nullptr; i++) name = base + std::to_string(i);
  return name;
}

struct Embedder {
  const EmbeddingPlan& plan;
  const Signature& signature;
  std::set<std::string> avoid_vars;  // all variable names of the source formula
  int world_counter = 0;
  std::vector<std::pair<std::string, Type>> scope;  // binder types (source)

  // Connective usage, for defs mode: short name -> quantified source type
  // (invalid for propositional connectives) and whether the eiw guard applies.
  std::set<std::string> used_defs;
  std::map<std::string, std::pair<Type, bool>> quant_defs;

  Type world_type() const { return Type::base(plan.world_type); }
  Type sigma() const { return Type::fun(world_type(), types::boolean()); }

  std::string fresh_world_var() {
    for (;;) {
      std::string cand = world_counter == 0 ? "V" : "V" + std::to_string(world_counter);
      world_counter++;
      if (!avoid_vars.count(cand)) {
        avoid_vars.insert(cand);
        return cand;
      }
    }
  }

  const Type* scoped_type(const std::string& var) const {
    for (auto it = scope.rbegin(); it != scope.rend(); ++it)
      if (it->first == var) return &it->second;
    return nullptr;
  }

  Type term_type(const Expr& t) const {
    switch (t.kind()) {
      case ExprKind::Var: {
        if (const Type* ty = scoped_type(t.name())) return *ty;
        return types::individual();
      }
      case ExprKind::Const:
      case ExprKind::App: {
        if (const Type* ty = signature.lookup(t.name())) {
          Type r = *ty;
          for (size_t i = 0; t.kind() == ExprKind::App && i < t.args().size() && r.is_fun(); i++)
            r = r.to();
          return r;
        }
        return types::individual();
      }
      default:
        return types::boolean();
    }
  }

  Expr rel(const std::string& index) const {
    auto it = plan.rel_names.find(index);
    if (it == plan.rel_names.end())
      throw ToolError(ErrorCode::Internal, "no relation planned for modal index");
    return Expr::constant(it->second);
  }

  Expr eiw_guard(const std::string& type_name, const Expr& element, const Expr& world) const {
    return Expr::apply(Expr::apply(Expr::constant(plan.eiw_names.at(type_name)), element), world);
  }

  bool guarded(const Type& t) const {
    return t.is_base() && t.name() != "$o" &&
           plan.domains_for(t.name()) != DomainSemantics::Constant;
  }

  // Rigid term translation: first-order applications become curried chains;
  // boolean subterms become lifted predicates.
  Expr term(const Expr& t) {
    switch (t.kind()) {
      case ExprKind::Var:
      case ExprKind::Const:
        return t;
      case ExprKind::App: {
        Expr head = Expr::constant(t.name());
        for (const Expr& a : t.args()) head = Expr::apply(std::move(head), term(a));
        return head;
      }
      default:
        return lifted(t);  // boolean argument
    }
  }

  // --- inline mode: formula truth at a world ------------------------------

  Expr at(const Expr& f, const Expr& world) {
    switch (f.kind()) {
      case ExprKind::Var:
      case ExprKind::Const:
        return Expr::apply(f, world);
      case ExprKind::App: {
        Expr head = Expr::constant(f.name());
        for (const Expr& a : f.args()) head = Expr::apply(std::move(head), term(a));
        return Expr::apply(std::move(head), world);
      }
      case ExprKind::Truth:
        return f;
      case ExprKind::Eq: {
        if (term_type(f.lhs()).is_base("$o"))  // world-relative boolean identity
          return Expr::binary(BinOp::Iff, at(f.lhs(), world), at(f.rhs(), world));
        return Expr::eq(term(f.lhs()), term(f.rhs()));
      }
      case ExprKind::Not:
        return Expr::neg(at(f.body(), world));
      case ExprKind::Binary:
        return Expr::binary(f.op(), at(f.lhs(), world), at(f.rhs(), world));
      case ExprKind::Quant: {
        const Type& ty = f.bound_type();
        scope.emplace_back(f.bound_var(), ty);
        Expr body = at(f.body(), world);
        scope.pop_back();
        if (guarded(ty)) {
          Expr guard = eiw_guard(ty.name(), Expr::var(f.bound_var()), world);
          body = f.quant_kind() == QuantKind::Forall
                     ? Expr::binary(BinOp::Implies, std::move(guard), std::move(body))
                     : Expr::binary(BinOp::And, std::move(guard), std::move(body));
        }
        return Expr::quant(f.quant_kind(), f.bound_var(), lift_type(ty, plan), std::move(body));
      }
      case ExprKind::Modal: {
        std::string v = fresh_world_var();
        Expr body = at(f.body(), Expr::var(v));
        if (plan.s5u)
          return Expr::quant(f.modal_op() == ModalOp::Box ? QuantKind::Forall : QuantKind::Exists,
                             v, world_type(), std::move(body));
        Expr edge = Expr::apply(Expr::apply(rel(f.modal_index().value_or("")), world), Expr::var(v));
        if (f.modal_op() == ModalOp::Box)
          return Expr::quant(QuantKind::Forall, v, world_type(),
                             Expr::binary(BinOp::Or, Expr::neg(std::move(edge)), std::move(body)));
        return Expr::quant(QuantKind::Exists, v, world_type(),
                           Expr::binary(BinOp::And, std::move(edge), std::move(body)));
      }
      case ExprKind::NclApp:
        throw ToolError(ErrorCode::UnhandledConnective,
                        "connective '{" + f.name() + "}' has no embedding");
      case ExprKind::Lambda:
      case ExprKind::Apply:
        throw ToolError(ErrorCode::UnsupportedFeature,
                        "higher-order source constructs cannot be embedded");
    }
    throw ToolError(ErrorCode::Internal, "unknown expression kind");
  }

  // --- defs mode: formulas as lifted-boolean terms -------------------------

  Expr def_const(const std::string& short_name) {
    used_defs.insert(short_name);
    return Expr::constant(def_symbol(signature, short_name));
  }

  Expr lifted(const Expr& f) {
    if (!plan.defs) {
      std::string w = fresh_world_var();
      return Expr::lambda(w, world_type(), at(f, Expr::var(w)));
    }
    switch (f.kind()) {
      case ExprKind::Var:
      case ExprKind::Const:
        return f;
      case ExprKind::App: {
        Expr head = Expr::constant(f.name());
        for (const Expr& a : f.args()) head = Expr::apply(std::move(head), term(a));
        return head;
      }
      case ExprKind::Truth:
      case ExprKind::Eq: {
        if (f.kind() == ExprKind::Eq && term_type(f.lhs()).is_base("$o"))
          return Expr::apply(Expr::apply(def_const("miff"), lifted(f.lhs())), lifted(f.rhs()));
        std::string w = fresh_world_var();
        Expr body = f.kind() == ExprKind::Truth ? f : Expr::eq(term(f.lhs()), term(f.rhs()));
        return Expr::lambda(w, world_type(), std::move(body));
      }
      case ExprKind::Not:
        return Expr::apply(def_const("mnot"), lifted(f.body()));
      case ExprKind::Binary: {
        const char* name = f.op() == BinOp::And       ? "mand"
                           : f.op() == BinOp::Or      ? "mor"
                           : f.op() == BinOp::Implies ? "mimplies"
                                                      : "miff";
        if (f.op() == BinOp::ImpliedBy || f.op() == BinOp::Xor)
          throw ToolError(ErrorCode::Internal, "connectives must be normalized before embedding");
        return Expr::apply(Expr::apply(def_const(name), lifted(f.lhs())), lifted(f.rhs()));
      }
      case ExprKind::Quant: {
        const Type& ty = f.bound_type();
        if (!ty.is_base())
          throw ToolError(ErrorCode::UnsupportedFeature,
                          "function-typed quantification is not supported with --defs");
        std::string base = f.quant_kind() == QuantKind::Forall ? "mforall" : "mexists";
        bool g = guarded(ty);
        std::string suffix = ty.name() == "$i" ? "_i" : type_suffix(ty.name());
        std::string def = base + (g ? "" : "_const") + suffix;
        quant_defs[def] = {ty, g};
        scope.emplace_back(f.bound_var(), ty);
        Expr body = lifted(f.body());
        scope.pop_back();
        Expr pred = Expr::lambda(f.bound_var(), lift_type(ty, plan), std::move(body));
        return Expr::apply(def_const(def), std::move(pred));
      }
      case ExprKind::Modal: {
        std::string idx = f.modal_index().value_or("");
        std::string name = (f.modal_op() == ModalOp::Box ? "mbox" : "mdia") +
                           (idx.empty() ? "" : "_" + idx);
        return Expr::apply(def_const(name), lifted(f.body()));
      }
      case ExprKind::NclApp:
        throw ToolError(ErrorCode::UnhandledConnective,
                        "connective '{" + f.name() + "}' has no embedding");
      case ExprKind::Lambda:
      case ExprKind::Apply:
        throw ToolError(ErrorCode::UnsupportedFeature,
                        "higher-order source constructs cannot be embedded");
    }
    throw ToolError(ErrorCode::Internal, "unknown expression kind");
  }

  Expr apply_lifted(const Expr& lifted_form, const Expr& world) {
    if (lifted_form.kind() == ExprKind::Lambda)
      return substitute(lifted_form.body(), lifted_form.bound_var(), world);
    return Expr::apply(lifted_form, world);
  }
};

Embedder make_embedder(const Expr& f, const EmbeddingPlan& plan, const Signature& signature) {
  Embedder e{plan, signature};
  collect_var_names(f, e.avoid_vars);
  return e;
}

}  // namespace

Expr embed_formula(const Expr& f, const EmbeddingPlan& plan, const Signature& signature) {
  Embedder e = make_embedder(f, plan, signature);
  Expr n = normalize_connectives(f);
  if (plan.defs) return e.lifted(n);
  std::string w = e.avoid_vars.count("W") ? e.fresh_world_var() : "W";
  return Expr::lambda(w, Type::base(plan.world_type), e.at(n, Expr::var(w)));
}

Expr embed_formula_at(const Expr& f, const EmbeddingPlan& plan, const Signature& signature,
                      const Expr& world) {
  Embedder e = make_embedder(f, plan, signature);
  Expr n = normalize_connectives(f);
  if (plan.defs) return e.apply_lifted(e.lifted(n), world);
  return e.at(n, world);
}

// ---------------------------------------------------------------------------
// Generated axioms

namespace {

Type world_t(const EmbeddingPlan& plan) { return Type::base(plan.world_type); }

Expr rel_app(const std::string& rel, const Expr& a, const Expr& b) {
  return Expr::apply(Expr::apply(Expr::constant(rel), a), b);
}

AnnotatedFormula thf_axiom(std::string name, Expr f) {
  AnnotatedFormula af;
  af.keyword = FormKeyword::Thf;
  af.name = std::move(name);
  af.role = Role{RoleBase::Axiom, std::nullopt};
  af.content = std::move(f);
  return af;
}

AnnotatedFormula thf_decl(std::string name, std::string symbol, Type type) {
  AnnotatedFormula af;
  af.keyword = FormKeyword::Thf;
  af.name = std::move(name);
  af.role = Role{RoleBase::TypeDecl, std::nullopt};
  af.content = TypeDecl{std::move(symbol), std::move(type)};
  return af;
}

Expr frame_condition_formula(FrameCondition cond, const std::string& rel, const Type& mu) {
  Expr W = Expr::var("W"), V = Expr::var("V"), U = Expr::var("U");
  switch (cond) {
    case FrameCondition::Serial:
      return Expr::quant(QuantKind::Forall, "W", mu,
                         Expr::quant(QuantKind::Exists, "V", mu, rel_app(rel, W, V)));
    case FrameCondition::Reflexive:
      return Expr::quant(QuantKind::Forall, "W", mu, rel_app(rel, W, W));
    case FrameCondition::Symmetric:
      return Expr::quant(
          QuantKind::Forall, "W", mu,
          Expr::quant(QuantKind::Forall, "V", mu,
                      Expr::binary(BinOp::Implies, rel_app(rel, W, V), rel_app(rel, V, W))));
    case FrameCondition::Transitive:
      return Expr::quant(
          QuantKind::Forall, "W", mu,
          Expr::quant(
              QuantKind::Forall, "V", mu,
              Expr::quant(QuantKind::Forall, "U", mu,
                          Expr::binary(BinOp::Implies,
                                       Expr::binary(BinOp::And, rel_app(rel, W, V),
                                                    rel_app(rel, V, U)),
                                       rel_app(rel, W, U)))));
    case FrameCondition::Euclidean:
      return Expr::quant(
          QuantKind::Forall, "W", mu,
          Expr::quant(
              QuantKind::Forall, "V", mu,
              Expr::quant(QuantKind::Forall, "U", mu,
                          Expr::binary(BinOp::Implies,
                                       Expr::binary(BinOp::And, rel_app(rel, W, V),
                                                    rel_app(rel, W, U)),
                                       rel_app(rel, V, U)))));
    case FrameCondition::Universal:
      throw ToolError(ErrorCode::Internal, "universal frames emit no axiom");
  }
  throw ToolError(ErrorCode::Internal, "unknown frame condition");
}

}  // namespace

std::vector<AnnotatedFormula> emit_frame_axioms(const EmbeddingPlan& plan) {
  std::vector<AnnotatedFormula> out;
  if (plan.s5u) return out;
  Type mu = world_t(plan);
  for (const std::string& idx : plan.indices) {
    auto conds = plan.frame_axioms.find(idx);
    if (conds == plan.frame_axioms.end()) continue;
    const std::string& rel = plan.rel_names.at(idx);
    for (FrameCondition cond : conds->second) {
      if (cond == FrameCondition::Universal) continue;
      std::string name = rel + "_" + frame_condition_name(cond);
      out.push_back(thf_axiom(name, frame_condition_formula(cond, rel, mu)));
    }
  }
  return out;
}

std::vector<AnnotatedFormula> emit_domain_axioms(const EmbeddingPlan& plan,
                                                 const Problem& problem) {
  std::vector<AnnotatedFormula> out;
  Type mu = world_t(plan);

  for (const std::string& type_name : plan.eiw_types) {
    const std::string& eiw = plan.eiw_names.at(type_name);
    Type tau = Type::base(type_name);
    DomainSemantics sem = plan.domains_for(type_name);

    auto eiw_app = [&](Expr x, Expr w) {
      return Expr::apply(Expr::apply(Expr::constant(eiw), std::move(x)), std::move(w));
    };

    // (a) every world has a nonempty domain
    out.push_back(thf_axiom(
        eiw + "_nonempty",
        Expr::quant(QuantKind::Forall, "W", mu,
                    Expr::quant(QuantKind::Exists, "X", tau,
                                eiw_app(Expr::var("X"), Expr::var("W"))))));

    // (b) monotonicity along each accessibility relation
    if (sem == DomainSemantics::Cumulative || sem == DomainSemantics::Decreasing) {
      bool cumulative = sem == DomainSemantics::Cumulative;
      auto body = [&](const Expr& edge) {
        Expr from = eiw_app(Expr::var("X"), Expr::var(cumulative ? "V" : "W"));
        Expr to = eiw_app(Expr::var("X"), Expr::var(cumulative ? "W" : "V"));
        Expr ante = edge.valid() ? Expr::binary(BinOp::And, from, edge) : from;
        return Expr::quant(
            QuantKind::Forall, "X", tau,
            Expr::quant(QuantKind::Forall, "V", mu,
                        Expr::quant(QuantKind::Forall, "W", mu,
                                    Expr::binary(BinOp::Implies, ante, to))));
      };
      const char* kind = cumulative ? "_cumulative" : "_decreasing";
      if (plan.s5u) {
        // Universal relation: the guard degenerates and is dropped.
        out.push_back(thf_axiom(eiw + kind, body(Expr())));
      } else {
        for (const std::string& idx : plan.indices) {
          const std::string& rel = plan.rel_names.at(idx);
          Expr edge = rel_app(rel, Expr::var("V"), Expr::var("W"));
          std::string name = eiw + kind + (idx.empty() ? "" : "_" + idx);
          out.push_back(thf_axiom(name, body(edge)));
        }
      }
    }

    // (c) local terms: constants and functions of this result type exist in
    // every world
    for (const auto& [sym, type] : problem.signature.entries()) {
      if (type.mentions_bool() || type.is_base("$tType")) continue;
      if (!(type.result() == tau)) continue;
      if (type.is_base()) {
        out.push_back(thf_axiom(
            eiw + "_local_" + sym,
            Expr::quant(QuantKind::Forall, "W", mu,
                        eiw_app(Expr::constant(sym), Expr::var("W")))));
        continue;
      }
      std::vector<Type> args = type.args();
      Expr applied = Expr::constant(sym);
      Expr guards;
      for (size_t i = 0; i < args.size(); i++) {
        std::string x = "X" + std::to_string(i + 1);
        applied = Expr::apply(std::move(applied), Expr::var(x));
        if (args[i].is_base() && plan.eiw_names.count(args[i].name())) {
          Expr g = Expr::apply(
              Expr::apply(Expr::constant(plan.eiw_names.at(args[i].name())), Expr::var(x)),
              Expr::var("W"));
          guards = guards.valid() ? Expr::binary(BinOp::And, std::move(guards), std::move(g)) : g;
        }
      }
      Expr concl = eiw_app(std::move(applied), Expr::var("W"));
      Expr body = guards.valid()
                      ? Expr::binary(BinOp::Implies, std::move(guards), std::move(concl))
                      : std::move(concl);
      for (size_t i = args.size(); i > 0; i--)
        body = Expr::quant(QuantKind::Forall, "X" + std::to_string(i), args[i - 1],
                           std::move(body));
      body = Expr::quant(QuantKind::Forall, "W", mu, std::move(body));
      out.push_back(thf_axiom(eiw + "_local_" + sym, std::move(body)));
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Connective definitions (defs mode)

namespace {

struct DefCatalog {
  const EmbeddingPlan& plan;
  const Signature& user_signature;
  const std::map<std::string, std::pair<Type, bool>>& quant_defs;
  Type mu, sigma;

  DefCatalog(const EmbeddingPlan& p, const Signature& sig,
             const std::map<std::string, std::pair<Type, bool>>& qd)
      : plan(p), user_signature(sig), quant_defs(qd), mu(Type::base(p.world_type)),
        sigma(Type::fun(mu, types::boolean())) {}

  void decl_and_def(std::vector<AnnotatedFormula>& out, const std::string& sym, Type type,
                    Expr body) const {
    out.push_back(thf_decl(sym + "_decl", sym, std::move(type)));
    AnnotatedFormula def;
    def.keyword = FormKeyword::Thf;
    def.name = sym + "_def";
    def.role = Role{RoleBase::Definition, std::nullopt};
    def.content = Expr::eq(Expr::constant(sym), std::move(body));
    out.push_back(std::move(def));
  }

  Expr s_at_w(const char* s, const char* w) const {
    return Expr::apply(Expr::var(s), Expr::var(w));
  }

  void emit(std::vector<AnnotatedFormula>& out, const std::string& short_name) const {
    std::string sym = def_symbol(user_signature, short_name);
    if (short_name == "mnot") {
      decl_and_def(out, sym, Type::fun(sigma, sigma),
                   Expr::lambda("S", sigma,
                                Expr::lambda("W", mu, Expr::neg(s_at_w("S", "W")))));
      return;
    }
    if (short_name == "mand" || short_name == "mor" || short_name == "mimplies" ||
        short_name == "miff") {
      BinOp op = short_name == "mand"       ? BinOp::And
                 : short_name == "mor"      ? BinOp::Or
                 : short_name == "mimplies" ? BinOp::Implies
                                            : BinOp::Iff;
      decl_and_def(
          out, sym, Type::fun(sigma, Type::fun(sigma, sigma)),
          Expr::lambda("S", sigma,
                       Expr::lambda("T", sigma,
                                    Expr::lambda("W", mu,
                                                 Expr::binary(op, s_at_w("S", "W"),
                                                              s_at_w("T", "W"))))));
      return;
    }
    if (short_name.rfind("mbox", 0) == 0 || short_name.rfind("mdia", 0) == 0) {
      bool box = short_name.rfind("mbox", 0) == 0;
      std::string idx = short_name.size() > 4 ? short_name.substr(5) : "";
      Expr inner;
      if (plan.s5u) {
        inner = box ? Expr::quant(QuantKind::Forall, "V", mu, s_at_w("S", "V"))
                    : Expr::quant(QuantKind::Exists, "V", mu, s_at_w("S", "V"));
      } else {
        Expr edge = rel_app(plan.rel_names.at(idx), Expr::var("W"), Expr::var("V"));
        inner = box ? Expr::quant(QuantKind::Forall, "V", mu,
                                  Expr::binary(BinOp::Or, Expr::neg(edge), s_at_w("S", "V")))
                    : Expr::quant(QuantKind::Exists, "V", mu,
                                  Expr::binary(BinOp::And, edge, s_at_w("S", "V")));
      }
      decl_and_def(out, sym, Type::fun(sigma, sigma),
                   Expr::lambda("S", sigma, Expr::lambda("W", mu, std::move(inner))));
      return;
    }
    // Quantifier definition; source type and guard recorded at the use site.
    auto info = quant_defs.find(short_name);
    if (info == quant_defs.end())
      throw ToolError(ErrorCode::Internal, "no record for quantifier definition " + short_name);
    bool forall = short_name.rfind("mforall", 0) == 0;
    const Type& tau = info->second.first;
    bool guarded = info->second.second;
    Type tau_lifted = lift_type(tau, plan);
    Type pred_t = Type::fun(tau_lifted, sigma);
    Expr px_w = Expr::apply(Expr::apply(Expr::var("P"), Expr::var("X")), Expr::var("W"));
    Expr inner;
    if (!guarded) {
      inner = Expr::quant(forall ? QuantKind::Forall : QuantKind::Exists, "X", tau_lifted,
                          std::move(px_w));
    } else {
      Expr guard = Expr::apply(
          Expr::apply(Expr::constant(plan.eiw_names.at(tau.name())), Expr::var("X")),
          Expr::var("W"));
      Expr body = forall ? Expr::binary(BinOp::Implies, std::move(guard), std::move(px_w))
                         : Expr::binary(BinOp::And, std::move(guard), std::move(px_w));
      inner = Expr::quant(forall ? QuantKind::Forall : QuantKind::Exists, "X", tau_lifted,
                          std::move(body));
    }
    decl_and_def(out, sym, Type::fun(pred_t, sigma),
                 Expr::lambda("P", pred_t, Expr::lambda("W", mu, std::move(inner))));
  }
};

}  // namespace

Problem embed_problem(const Problem& problem, const LogicSpec& spec,
                      const EmbedOptions& options) {
  const AnnotatedFormula* conjecture = problem.conjecture();
  if (!conjecture)
    throw ToolError(ErrorCode::MissingConjecture, "problem has no conjecture to embed");

  EmbeddingPlan pl = plan(problem, spec, options);
  Type mu = Type::base(pl.world_type);
  Problem out;

  std::set<std::string> taken_names;
  for (const auto& af : problem.formulas) taken_names.insert(af.name);
  auto fresh_name = [&](const std::string& base) {
    std::string name = base;
    for (int i = 1; taken_names.count(name); i++) name = base + std::to_string(i);
    taken_names.insert(name);
    return name;
  };

  // World type, user base types, current world, relations, eiw predicates.
  out.formulas.push_back(thf_decl(fresh_name(pl.world_type + "_type"), pl.world_type,
                                  types::ttype()));
  out.signature.set(pl.world_type, types::ttype());

  std::map<std::string, std::string> decl_names;  // symbol -> original formula name
  for (const auto& af : problem.formulas)
    if (af.is_type_decl()) decl_names[af.type_decl().symbol] = af.name;

  for (const std::string& t : collect_individual_types(problem)) {
    if (t == "$i") continue;
    auto it = decl_names.find(t);
    std::string name = it != decl_names.end() ? it->second : fresh_name(t + "_type");
    out.formulas.push_back(thf_decl(name, t, types::ttype()));
    out.signature.set(t, types::ttype());
  }

  out.formulas.push_back(thf_decl(fresh_name(pl.current_world + "_decl"), pl.current_world, mu));
  out.signature.set(pl.current_world, mu);

  for (const std::string& idx : pl.indices) {
    if (pl.s5u) break;
    const std::string& rel = pl.rel_names.at(idx);
    Type rel_t = Type::fun(mu, Type::fun(mu, types::boolean()));
    out.formulas.push_back(thf_decl(fresh_name(rel + "_decl"), rel, rel_t));
    out.signature.set(rel, rel_t);
  }
  for (const std::string& t : pl.eiw_types) {
    const std::string& eiw = pl.eiw_names.at(t);
    Type eiw_t = Type::fun(Type::base(t), Type::fun(mu, types::boolean()));
    out.formulas.push_back(thf_decl(fresh_name(eiw + "_decl"), eiw, eiw_t));
    out.signature.set(eiw, eiw_t);
  }

  // Embed all logical formulas first so defs-mode usage is known.
  Expr w0 = Expr::constant(pl.current_world);
  std::vector<std::pair<const AnnotatedFormula*, Expr>> embedded;
  std::set<std::string> used_defs;
  std::map<std::string, std::pair<Type, bool>> quant_def_info;
  for (const auto& af : problem.formulas) {
    if (!af.is_formula()) continue;
    Embedder e = make_embedder(af.formula(), pl, problem.signature);
    Expr n = normalize_connectives(af.formula());
    Expr result;
    if (af.role.base == RoleBase::Conjecture || af.role.effective_locality() == Locality::Local) {
      result = pl.defs ? e.apply_lifted(e.lifted(n), w0) : e.at(n, w0);
    } else {
      std::string w = e.avoid_vars.count("W") ? e.fresh_world_var() : "W";
      Expr at_w = pl.defs ? e.apply_lifted(e.lifted(n), Expr::var(w)) : e.at(n, Expr::var(w));
      result = Expr::quant(QuantKind::Forall, w, mu, std::move(at_w));
    }
    used_defs.insert(e.used_defs.begin(), e.used_defs.end());
    quant_def_info.insert(e.quant_defs.begin(), e.quant_defs.end());
    embedded.emplace_back(&af, std::move(result));
  }

  // Connective definitions, in a fixed catalogue order.
  if (pl.defs) {
    DefCatalog catalog(pl, problem.signature, quant_def_info);
    std::vector<std::string> order = {"mnot", "mand", "mor", "mimplies", "miff"};
    for (const std::string& idx : pl.indices) {
      order.push_back("mbox" + (idx.empty() ? "" : "_" + idx));
      order.push_back("mdia" + (idx.empty() ? "" : "_" + idx));
    }
    std::vector<std::string> quant_order;
    for (const auto& [name, info] : quant_def_info) {
      (void)info;
      quant_order.push_back(name);
    }
    std::sort(quant_order.begin(), quant_order.end());
    order.insert(order.end(), quant_order.begin(), quant_order.end());
    std::vector<AnnotatedFormula> defs;
    for (const std::string& d : order)
      if (used_defs.count(d)) catalog.emit(defs, d);
    for (auto& af : defs) {
      if (af.is_type_decl()) out.signature.set(af.type_decl().symbol, af.type_decl().type);
      af.name = fresh_name(af.name);
      out.formulas.push_back(std::move(af));
    }
  }

  // Re-typed user signature.
  for (const auto& [sym, type] : problem.signature.entries()) {
    if (type.is_base("$tType")) continue;  // base types already declared
    Type lifted = lift_type(type, pl);
    auto it = decl_names.find(sym);
    std::string name = it != decl_names.end() ? it->second : fresh_name(sym + "_decl");
    out.formulas.push_back(thf_decl(name, sym, lifted));
    out.signature.set(sym, lifted);
  }

  for (auto& af : emit_frame_axioms(pl)) {
    af.name = fresh_name(af.name);
    out.formulas.push_back(std::move(af));
  }
  for (auto& af : emit_domain_axioms(pl, problem)) {
    af.name = fresh_name(af.name);
    out.formulas.push_back(std::move(af));
  }

  for (auto& [af, formula] : embedded) {
    AnnotatedFormula res;
    res.keyword = FormKeyword::Thf;
    res.name = af->name;
    res.role = Role{af->role.base, std::nullopt};
    res.content = std::move(formula);
    if (af->role.base == RoleBase::Conjecture) {
      // keep the conjecture last
      continue;
    }
    out.formulas.push_back(std::move(res));
  }
  {
    Embedder e = make_embedder(conjecture->formula(), pl, problem.signature);
    Expr n = normalize_connectives(conjecture->formula());
    Expr c = pl.defs ? e.apply_lifted(e.lifted(n), w0) : e.at(n, w0);
    AnnotatedFormula res;
    res.keyword = FormKeyword::Thf;
    res.name = conjecture->name;
    res.role = Role{RoleBase::Conjecture, std::nullopt};
    res.content = std::move(c);
    out.formulas.push_back(std::move(res));
  }
  return out;
}

}  // namespace modalkit
