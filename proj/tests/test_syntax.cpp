#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "modalkit/corpus.hpp"
#include "modalkit/parser.hpp"
#include "modalkit/syntax.hpp"
#include "modalkit/typecheck.hpp"

using namespace modalkit;

namespace {

Expr parse_f(const std::string& text) {
  ParseResult r = parse_problem("tff(f,axiom, " + text + " ).");
  REQUIRE_MESSAGE(r.ok(), text);
  return r.problem->formulas.front().formula();
}

// Random source-stage formulas for property tests.
Expr random_formula(std::mt19937& rng, int depth) {
  int pick = static_cast<int>(rng() % (depth <= 0 ? 3 : 9));
  switch (pick) {
    case 0: return Expr::constant("p");
    case 1: return Expr::constant("q");
    case 2: return Expr::app("r", {Expr::var("X"), Expr::var("Y")});
    case 3: return Expr::neg(random_formula(rng, depth - 1));
    case 4:
      return Expr::modal(rng() % 2 ? ModalOp::Box : ModalOp::Dia, std::nullopt,
                         random_formula(rng, depth - 1));
    case 5:
      return Expr::quant(rng() % 2 ? QuantKind::Forall : QuantKind::Exists, "X",
                         types::individual(), random_formula(rng, depth - 1));
    default: {
      BinOp ops[] = {BinOp::And, BinOp::Or, BinOp::Implies, BinOp::Iff, BinOp::Xor,
                     BinOp::ImpliedBy};
      return Expr::binary(ops[rng() % 6], random_formula(rng, depth - 1),
                          random_formula(rng, depth - 1));
    }
  }
}

void subformulas(const Expr& f, std::vector<Expr>& out) {
  out.push_back(f);
  switch (f.kind()) {
    case ExprKind::App:
    case ExprKind::NclApp:
      for (const Expr& a : f.args()) subformulas(a, out);
      break;
    case ExprKind::Eq:
    case ExprKind::Binary:
    case ExprKind::Apply:
      subformulas(f.args()[0], out);
      subformulas(f.args()[1], out);
      break;
    case ExprKind::Not:
    case ExprKind::Quant:
    case ExprKind::Modal:
    case ExprKind::Lambda:
      subformulas(f.body(), out);
      break;
    default:
      break;
  }
}

}  // namespace

TEST_CASE("free_variables") {
  CHECK(free_variables(parse_f("! [X: $i]: p(X)")).empty());
  CHECK(free_variables(parse_f("p(X) | q(Y)")) == std::set<std::string>{"X", "Y"});
  CHECK(free_variables(parse_f("! [X: $i]: ({$box} @ (r(X,Y)))")) == std::set<std::string>{"Y"});
}

TEST_CASE("modal_depth") {
  CHECK(modal_depth(parse_f("p")) == 0);
  CHECK(modal_depth(parse_f("{$box} @ ({$dia} @ (p))")) == 2);
  CHECK(modal_depth(parse_f("({$box} @ (p)) & ({$box} @ (q))")) == 1);
}

TEST_CASE("modal_depth of subformulas never exceeds the whole") {
  std::mt19937 rng(42);
  for (int i = 0; i < 300; i++) {
    Expr f = random_formula(rng, 4);
    int whole = modal_depth(f);
    std::vector<Expr> subs;
    subformulas(f, subs);
    for (const Expr& s : subs) CHECK(modal_depth(s) <= whole);
  }
}

TEST_CASE("infer_signature assigns monomorphic types") {
  ParseResult r = parse_problem("tff(f,axiom, p(a) ).");
  REQUIRE(r.ok());
  const Signature& sig = r.problem->signature;
  CHECK(*sig.lookup("p") == Type::fun(types::individual(), types::boolean()));
  CHECK(*sig.lookup("a") == types::individual());
}

TEST_CASE("infer_signature types nested functions") {
  ParseResult r = parse_problem("tff(f,axiom, q(f(a,b)) ).");
  REQUIRE(r.ok());
  const Signature& sig = r.problem->signature;
  Type ii = types::individual();
  CHECK(*sig.lookup("f") == Type::fun({ii, ii}, ii));
  CHECK(*sig.lookup("q") == Type::fun(ii, types::boolean()));
  CHECK(*sig.lookup("a") == ii);
  CHECK(*sig.lookup("b") == ii);
}

TEST_CASE("infer_signature conflicts") {
  Problem p;
  AnnotatedFormula af;
  af.name = "f";
  af.role = Role{RoleBase::Axiom, std::nullopt};
  af.content = Expr::binary(BinOp::And, Expr::app("p", {Expr::constant("a")}),
                            Expr::app("p", {Expr::constant("a"), Expr::constant("b")}));
  p.formulas.push_back(af);
  try {
    infer_signature(p);
    CHECK(false);
  } catch (const ToolError& e) {
    CHECK(e.code() == ErrorCode::ArityConflict);
  }

  Problem q;
  af.content = Expr::app("p", {Expr::app("p", {Expr::constant("a")})});
  q.formulas.push_back(af);
  try {
    infer_signature(q);
    CHECK(false);
  } catch (const ToolError& e) {
    CHECK(e.code() == ErrorCode::SortConflict);
  }
}

TEST_CASE("infer_signature is idempotent and keeps declarations") {
  ParseResult r = parse_problem(
      "tff(d,type, p: some_type > $o ).\n"
      "tff(f,axiom, p(a) & q(b) ).");
  REQUIRE(r.ok());
  Problem once = *r.problem;
  Problem twice = infer_signature(once);
  CHECK(once.signature == twice.signature);
  CHECK(*once.signature.lookup("p") == Type::fun(Type::base("some_type"), types::boolean()));
  CHECK(*once.signature.lookup("q") == Type::fun(types::individual(), types::boolean()));
}

TEST_CASE("alpha equality ignores bound names, identical does not") {
  Expr a = parse_f("! [X: $i]: p(X)");
  Expr b = parse_f("! [Y: $i]: p(Y)");
  CHECK(Expr::alpha_equal(a, b));
  CHECK_FALSE(Expr::identical(a, b));
  CHECK(Expr::identical(a, a));

  Expr l1 = Expr::lambda("X", types::individual(), Expr::var("X"));
  Expr l2 = Expr::lambda("Z", types::individual(), Expr::var("Z"));
  CHECK(Expr::alpha_equal(l1, l2));
  CHECK_FALSE(Expr::alpha_equal(l1, Expr::lambda("X", types::boolean(), Expr::var("X"))));
}

TEST_CASE("normalize_connectives removes <~> and <=") {
  Expr f = parse_f("(p <= q) & (p <~> q)");
  Expr n = normalize_connectives(f);
  CHECK(Expr::identical(
      n, Expr::binary(BinOp::And,
                      Expr::binary(BinOp::Implies, Expr::constant("q"), Expr::constant("p")),
                      Expr::neg(Expr::binary(BinOp::Iff, Expr::constant("p"),
                                             Expr::constant("q"))))));
}

TEST_CASE("beta normalization") {
  Expr id = Expr::lambda("X", types::boolean(), Expr::var("X"));
  Expr applied = Expr::apply(id, Expr::constant("p"));
  CHECK_FALSE(is_beta_normal(applied));
  CHECK(Expr::identical(beta_normalize(applied), Expr::constant("p")));

  // capture avoidance: (^X. ^Y. X) Y  must not capture the free Y
  Expr k = Expr::lambda("X", types::boolean(),
                        Expr::lambda("Y", types::boolean(), Expr::var("X")));
  Expr result = beta_normalize(Expr::apply(k, Expr::var("Y")));
  REQUIRE(result.kind() == ExprKind::Lambda);
  CHECK(result.bound_var() != "Y");
  CHECK(Expr::identical(result.body(), Expr::var("Y")));
}

TEST_CASE("substitute respects shadowing") {
  // (! [X]: p(X)) has no free X
  Expr f = parse_f("! [X: $i]: p(X)");
  CHECK(Expr::identical(substitute(f, "X", Expr::constant("a")), f));
  Expr g = parse_f("p(X)");
  CHECK(Expr::identical(substitute(g, "X", Expr::constant("a")), parse_f("p(a)")));
}

TEST_CASE("role locality defaults") {
  CHECK(Role{RoleBase::Axiom, std::nullopt}.effective_locality() == Locality::Global);
  CHECK(Role{RoleBase::Hypothesis, std::nullopt}.effective_locality() == Locality::Local);
  CHECK(Role{RoleBase::Axiom, Locality::Local}.effective_locality() == Locality::Local);
  CHECK(Role{RoleBase::Hypothesis, Locality::Global}.effective_locality() == Locality::Global);
  CHECK(Role{RoleBase::Conjecture, std::nullopt}.effective_locality() == Locality::Local);
  CHECK(Role::parse("axiom-local")->show() == "axiom-local");
  CHECK_FALSE(Role::parse("axiom-sideways").has_value());
  CHECK_FALSE(Role::parse("conjecture-global").has_value());
}

TEST_CASE("typecheck accepts embedded shapes and rejects ill-typed terms") {
  ParseResult r = parse_problem(
      "thf(pd,type, p: $i > $o ).\n"
      "thf(cd,type, c: $i ).\n"
      "thf(f,axiom, p @ c ).");
  REQUIRE(r.ok());
  CHECK_NOTHROW(typecheck_problem(*r.problem));

  ParseResult bad = parse_problem(
      "thf(pd,type, p: $i > $o ).\n"
      "thf(f,axiom, p @ p ).");
  REQUIRE(bad.ok());
  try {
    typecheck_problem(*bad.problem);
    CHECK(false);
  } catch (const ToolError& e) {
    CHECK(e.code() == ErrorCode::TypeError);
  }
}

TEST_CASE("problems reject duplicate names and double conjectures") {
  ParseResult dup = parse_problem("tff(f,axiom, p ).\ntff(f,axiom, q ).");
  CHECK_FALSE(dup.ok());
  ParseResult two = parse_problem("tff(a,conjecture, p ).\ntff(b,conjecture, q ).");
  CHECK_FALSE(two.ok());
}
