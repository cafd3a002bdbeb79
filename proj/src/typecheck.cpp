#include "modalkit/typecheck.hpp"

#include <vector>

namespace modalkit {

namespace {

struct Checker {
  const Signature& sig;
  std::vector<std::pair<std::string, Type>> binders;

  const Type* bound_type(const std::string& name) const {
    for (auto it = binders.rbegin(); it != binders.rend(); ++it)
      if (it->first == name) return &it->second;
    return nullptr;
  }

  Type symbol_type(const std::string& name) const {
    if (const Type* t = sig.lookup(name)) return *t;
    throw ToolError(ErrorCode::UnassignedSymbol, "no type for symbol '" + name + "'");
  }

  void expect_bool(const Expr& f, const char* what) {
    Type t = check(f);
    if (!t.is_base("$o"))
      throw ToolError(ErrorCode::TypeError,
                      std::string(what) + " expects a boolean operand, got " + t.show());
  }

  Type check(const Expr& f) {
    switch (f.kind()) {
      case ExprKind::Var: {
        if (const Type* t = bound_type(f.name())) return *t;
        throw ToolError(ErrorCode::TypeError, "unbound variable '" + f.name() + "'");
      }
      case ExprKind::Const:
        return symbol_type(f.name());
      case ExprKind::App: {
        Type head = symbol_type(f.name());
        for (const Expr& a : f.args()) {
          if (!head.is_fun())
            throw ToolError(ErrorCode::TypeError, "symbol '" + f.name() + "' applied to too many arguments");
          Type at = check(a);
          if (at != head.from())
            throw ToolError(ErrorCode::TypeError,
                            "argument of '" + f.name() + "' has type " + at.show() +
                                ", expected " + head.from().show());
          head = head.to();
        }
        return head;
      }
      case ExprKind::Eq: {
        Type l = check(f.lhs());
        Type r = check(f.rhs());
        if (l != r)
          throw ToolError(ErrorCode::TypeError,
                          "equality between " + l.show() + " and " + r.show());
        return types::boolean();
      }
      case ExprKind::Not:
        expect_bool(f.body(), "negation");
        return types::boolean();
      case ExprKind::Binary:
        expect_bool(f.lhs(), "binary connective");
        expect_bool(f.rhs(), "binary connective");
        return types::boolean();
      case ExprKind::Quant: {
        binders.emplace_back(f.bound_var(), f.bound_type());
        expect_bool(f.body(), "quantified body");
        binders.pop_back();
        return types::boolean();
      }
      case ExprKind::Modal:
        expect_bool(f.body(), "modal operator");
        return types::boolean();
      case ExprKind::NclApp:
        for (const Expr& a : f.args()) expect_bool(a, "non-classical connective");
        return types::boolean();
      case ExprKind::Truth:
        return types::boolean();
      case ExprKind::Lambda: {
        binders.emplace_back(f.bound_var(), f.bound_type());
        Type body = check(f.body());
        binders.pop_back();
        return Type::fun(f.bound_type(), body);
      }
      case ExprKind::Apply: {
        Type fun = check(f.fun());
        if (!fun.is_fun())
          throw ToolError(ErrorCode::TypeError, "application head has type " + fun.show());
        Type at = check(f.arg());
        if (at != fun.from())
          throw ToolError(ErrorCode::TypeError,
                          "applied argument has type " + at.show() + ", expected " + fun.from().show());
        return fun.to();
      }
    }
    throw ToolError(ErrorCode::Internal, "unknown expression kind");
  }
};

}  // namespace

Type type_of(const Expr& f, const Signature& sig) {
  Checker c{sig, {}};
  return c.check(f);
}

void typecheck_problem(const Problem& p) {
  for (const auto& af : p.formulas) {
    if (!af.is_formula()) continue;
    Type t = type_of(af.formula(), p.signature);
    if (!t.is_base("$o"))
      throw ToolError(ErrorCode::TypeError,
                      "formula '" + af.name + "' has type " + t.show() + ", expected $o");
  }
}

}  // namespace modalkit
