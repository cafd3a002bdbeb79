#include "modalkit/printer.hpp"

#include <functional>
#include <sstream>

namespace modalkit {

namespace {

constexpr size_t kMaxLine = 120;

bool ho_style(PrintStyle s) { return s != PrintStyle::Nxf; }

void check_stage(const Expr& f, PrintStyle style, const std::string& name) {
  if (style == PrintStyle::Nxf && f.contains_ho())
    throw ToolError(ErrorCode::StageMismatch,
                    "formula '" + name + "' contains higher-order constructs; cannot print as NXF");
  if (style == PrintStyle::Thf && f.contains_modal())
    throw ToolError(ErrorCode::StageMismatch,
                    "formula '" + name + "' contains non-classical connectives; cannot print as THF");
}

const char* bin_op_token(BinOp op) {
  switch (op) {
    case BinOp::And: return "&";
    case BinOp::Or: return "|";
    case BinOp::Implies: return "=>";
    case BinOp::ImpliedBy: return "<=";
    case BinOp::Iff: return "<=>";
    case BinOp::Xor: return "<~>";
  }
  return "?";
}

struct Renderer {
  PrintStyle style;

  std::string ncl_head(const std::string& name, const std::vector<NclParam>& params) const {
    std::string s = "{" + name;
    if (!params.empty()) {
      s += "(";
      bool first = true;
      for (const auto& p : params) {
        if (!first) s += ", ";
        first = false;
        if (p.key == "#") {
          s += "#" + p.values.front();
        } else {
          s += p.key + " := ";
          if (p.list) {
            s += "[";
            for (size_t i = 0; i < p.values.size(); i++)
              s += (i ? "," : "") + p.values[i];
            s += "]";
          } else {
            s += p.values.front();
          }
        }
      }
      s += ")";
    }
    return s + "}";
  }

  std::string modal_head(const Expr& f) const {
    std::string s = "{";
    s += f.modal_op() == ModalOp::Box ? "$box" : "$dia";
    if (f.modal_index()) s += "(#" + *f.modal_index() + ")";
    return s + "}";
  }

  // Atom-like units that never need parentheses as operands.
  bool atomic(const Expr& f) const {
    switch (f.kind()) {
      case ExprKind::Var:
      case ExprKind::Const:
      case ExprKind::App:
      case ExprKind::Truth:
        return true;
      default:
        return false;
    }
  }

  // Safe operand positions inside &, |, =>, ... chains.
  bool unit(const Expr& f) const {
    if (atomic(f)) return true;
    switch (f.kind()) {
      case ExprKind::Eq:
        return true;
      case ExprKind::Not:
        return true;
      case ExprKind::Modal:
      case ExprKind::NclApp:
        return !ho_style(style);  // {$box} @ (phi) is self-delimiting
      default:
        return false;
    }
  }

  std::string paren_unless(const Expr& f, bool bare) const {
    std::string s = render(f);
    return bare ? s : "(" + s + ")";
  }

  std::string render_term(const Expr& f) const {
    // Operand of '=' / '!=' or argument list entry.
    return paren_unless(f, atomic(f));
  }

  std::string render_eq(const Expr& eq, bool negated) const {
    return render_term(eq.lhs()) + (negated ? " != " : " = ") + render_term(eq.rhs());
  }

  std::string render_binder(const Expr& f) const {
    // Merge consecutive binders of the same kind (without shadowing).
    bool is_lambda = f.kind() == ExprKind::Lambda;
    QuantKind qk = is_lambda ? QuantKind::Forall : f.quant_kind();
    std::vector<const Expr*> chain{&f};
    std::set<std::string> names{f.bound_var()};
    const Expr* cur = &f.body();
    while (cur->kind() == f.kind() && (is_lambda || cur->quant_kind() == qk) &&
           !names.count(cur->bound_var())) {
      chain.push_back(cur);
      names.insert(cur->bound_var());
      cur = &cur->body();
    }
    std::string head = is_lambda ? "^" : (qk == QuantKind::Forall ? "!" : "?");
    std::string s = head + " [";
    for (size_t i = 0; i < chain.size(); i++) {
      if (i) s += ", ";
      s += chain[i]->bound_var() + ": " + chain[i]->bound_type().show();
    }
    s += "]: ";
    const Expr& body = *cur;
    bool bare = unit(body) || body.kind() == ExprKind::Quant ||
                body.kind() == ExprKind::Lambda;
    return s + paren_unless(body, bare);
  }

  std::string render_apply(const Expr& f) const {
    const Expr& fun = f.fun();
    bool fun_bare = fun.kind() == ExprKind::Apply || atomic(fun);
    std::string s = paren_unless(fun, fun_bare);
    const Expr& a = f.arg();
    bool arg_bare = a.kind() == ExprKind::Var || a.kind() == ExprKind::Const ||
                    a.kind() == ExprKind::Truth;
    return s + " @ " + paren_unless(a, arg_bare);
  }

  std::string render(const Expr& f) const {
    switch (f.kind()) {
      case ExprKind::Var:
      case ExprKind::Const:
        return f.name();
      case ExprKind::App: {
        std::string s = f.name() + "(";
        for (size_t i = 0; i < f.args().size(); i++)
          s += (i ? "," : "") + render_term(f.args()[i]);
        return s + ")";
      }
      case ExprKind::Truth:
        return f.truth_value() ? "$true" : "$false";
      case ExprKind::Eq:
        return render_eq(f, false);
      case ExprKind::Not:
        if (f.body().kind() == ExprKind::Eq) return render_eq(f.body(), true);
        return "~ " + paren_unless(f.body(), unit(f.body()));
      case ExprKind::Binary: {
        BinOp op = f.op();
        if (op == BinOp::And || op == BinOp::Or) {
          // Flatten associative chains.
          std::vector<const Expr*> operands;
          std::function<void(const Expr&)> flatten = [&](const Expr& e) {
            if (e.kind() == ExprKind::Binary && e.op() == op) {
              flatten(e.lhs());
              flatten(e.rhs());
            } else {
              operands.push_back(&e);
            }
          };
          flatten(f);
          std::string s;
          for (size_t i = 0; i < operands.size(); i++) {
            if (i) s += std::string(" ") + bin_op_token(op) + " ";
            s += paren_unless(*operands[i], unit(*operands[i]));
          }
          return s;
        }
        return paren_unless(f.lhs(), unit(f.lhs())) + " " + bin_op_token(op) + " " +
               paren_unless(f.rhs(), unit(f.rhs()));
      }
      case ExprKind::Quant:
      case ExprKind::Lambda:
        return render_binder(f);
      case ExprKind::Modal: {
        std::string head = modal_head(f);
        if (!ho_style(style)) return head + " @ (" + render(f.body()) + ")";
        const Expr& b = f.body();
        bool bare = b.kind() == ExprKind::Var || b.kind() == ExprKind::Const ||
                    b.kind() == ExprKind::Truth;
        return head + " @ " + paren_unless(b, bare);
      }
      case ExprKind::NclApp: {
        std::string head = ncl_head(f.name(), f.ncl_params());
        if (!ho_style(style)) {
          std::string s = head + " @ (";
          for (size_t i = 0; i < f.args().size(); i++) s += (i ? "," : "") + render(f.args()[i]);
          return s + ")";
        }
        std::string s = head;
        for (const Expr& a : f.args()) {
          bool bare = a.kind() == ExprKind::Var || a.kind() == ExprKind::Const ||
                      a.kind() == ExprKind::Truth;
          s += " @ " + paren_unless(a, bare);
        }
        return s;
      }
      case ExprKind::Apply:
        return render_apply(f);
    }
    return "?";
  }
};

std::string schemes_to_text(const SchemeSet& schemes) {
  if (const char* sys = system_token_for(schemes)) return sys;
  std::string s = "[ ";
  bool first = true;
  for (AxiomScheme a : schemes) {
    if (!first) s += ", ";
    first = false;
    s += axiom_scheme_token(a);
  }
  return s + " ]";
}

std::string domains_to_text(const LogicSpec& spec) {
  if (spec.domain_overrides.empty()) return domain_semantics_name(spec.default_domains);
  std::string s = std::string("[ ") + domain_semantics_name(spec.default_domains);
  for (const auto& [type, sem] : spec.domain_overrides)
    s += std::string(", ") + type + " == " + domain_semantics_name(sem);
  return s + " ]";
}

std::string modalities_to_text(const ModalitySpec& m) {
  if (m.per_index.empty()) return schemes_to_text(m.default_schemes);
  std::string s = "[ " + schemes_to_text(m.default_schemes);
  for (const auto& [index, schemes] : m.per_index)
    s += ", {$box(#" + index + ")} == " + schemes_to_text(schemes);
  return s + " ]";
}

// Greedy wrap at spaces, 4-space continuation indent; never splits tokens.
std::string wrap_text(const std::string& header, const std::string& content,
                      const std::string& tail) {
  std::string single = header + content + tail;
  if (single.size() <= kMaxLine) return single + "\n";

  std::string trimmed = header;
  while (!trimmed.empty() && trimmed.back() == ' ') trimmed.pop_back();
  std::string out = trimmed + "\n";
  std::string line = "    ";
  std::istringstream words(content);
  std::string word;
  bool first = true;
  while (words >> word) {
    if (!first && line.size() + 1 + word.size() > kMaxLine) {
      out += line + "\n";
      line = "    " + word;
      continue;
    }
    if (!first) line += " ";
    line += word;
    first = false;
  }
  if (line.size() + tail.size() > kMaxLine) {
    out += line + "\n";
    line = "   ";  // tail starts with a space
  }
  out += line + tail + "\n";
  return out;
}

}  // namespace

std::string print_formula(const Expr& f, PrintStyle style) {
  check_stage(f, style, "<formula>");
  Renderer r{style};
  return r.render(f);
}

std::string print_logic_spec(const LogicSpec& spec) {
  std::string s = "$modal == [ $domains == " + domains_to_text(spec);
  s += std::string(", $designation == ") + designation_name(spec.designation);
  s += ", $modalities == " + modalities_to_text(spec.modalities);
  return s + " ]";
}

std::string print_annotated(const AnnotatedFormula& af, PrintStyle style) {
  const char* kw = style == PrintStyle::Nxf ? "tff" : "thf";
  std::string header = std::string(kw) + "(" + af.name + "," + af.role.show() + ", ";
  std::string content;
  if (af.is_type_decl()) {
    content = af.type_decl().symbol + ": " + af.type_decl().type.show();
  } else if (af.is_logic_spec()) {
    content = print_logic_spec(af.logic_spec());
  } else {
    check_stage(af.formula(), style, af.name);
    Renderer r{style};
    content = r.render(af.formula());
  }
  std::string tail;
  if (!af.source.empty()) {
    tail += ", " + af.source;
    if (!af.useful_info.empty()) tail += ", " + af.useful_info;
  }
  return wrap_text(header, content, tail + " ).");
}

std::string print_problem(const Problem& p, PrintStyle style) {
  std::string out;
  for (const auto& af : p.formulas) out += print_annotated(af, style);
  return out;
}

PrintStyle natural_style(const Problem& p) {
  bool thf = false, modal = false;
  for (const auto& af : p.formulas) {
    if (af.keyword == FormKeyword::Thf) thf = true;
    if (af.is_formula() && af.formula().contains_modal()) modal = true;
  }
  if (!thf) return PrintStyle::Nxf;
  return modal ? PrintStyle::Nhf : PrintStyle::Thf;
}

}  // namespace modalkit
