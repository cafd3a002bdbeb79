#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sstream>

#include "modalkit/parser.hpp"
#include "modalkit/printer.hpp"

using namespace modalkit;

namespace {

Problem parse_ok(const std::string& text) {
  ParseResult r = parse_problem(text);
  if (!r.ok())
    for (const auto& d : r.diagnostics) MESSAGE(d.render());
  REQUIRE(r.ok());
  return *r.problem;
}

// print(parse(print(parse(text)))) must equal print(parse(text)) byte for
// byte, and the ASTs must be identical.
void check_roundtrip(const std::string& text) {
  ParseResult first = parse_problem(text);
  REQUIRE_MESSAGE(first.ok(), text);
  PrintStyle style = natural_style(*first.problem);
  std::string canonical = print_problem(*first.problem, style);
  ParseResult second = parse_problem(canonical);
  REQUIRE_MESSAGE(second.ok(), canonical);
  REQUIRE(second.problem->formulas.size() == first.problem->formulas.size());
  for (size_t i = 0; i < first.problem->formulas.size(); i++) {
    const AnnotatedFormula& a = first.problem->formulas[i];
    const AnnotatedFormula& b = second.problem->formulas[i];
    CHECK(a.name == b.name);
    CHECK(a.role == b.role);
    if (a.is_formula()) {
      REQUIRE(b.is_formula());
      CHECK_MESSAGE(Expr::identical(a.formula(), b.formula()), canonical);
    } else if (a.is_type_decl()) {
      REQUIRE(b.is_type_decl());
      CHECK(a.type_decl() == b.type_decl());
    } else {
      REQUIRE(b.is_logic_spec());
      CHECK(a.logic_spec() == b.logic_spec());
    }
  }
  CHECK(print_problem(*second.problem, style) == canonical);
}

}  // namespace

TEST_CASE("box prints in parenthesized NXF application form") {
  Expr f = Expr::modal(ModalOp::Box, std::nullopt, Expr::constant("p"));
  CHECK(print_formula(f, PrintStyle::Nxf) == "{$box} @ (p)");
  CHECK(print_formula(f, PrintStyle::Nhf) == "{$box} @ p");
  Expr indexed = Expr::modal(ModalOp::Dia, "a", Expr::constant("p"));
  CHECK(print_formula(indexed, PrintStyle::Nxf) == "{$dia(#a)} @ (p)");
}

TEST_CASE("lambdas print with binder types") {
  Expr f = Expr::lambda("W", Type::base("emb__world"),
                        Expr::neg(Expr::apply(Expr::constant("p"), Expr::var("W"))));
  CHECK(print_formula(f, PrintStyle::Thf) == "^ [W: emb__world]: ~ (p @ W)");
}

TEST_CASE("printing a modal formula as THF is a stage mismatch") {
  Expr f = Expr::modal(ModalOp::Box, std::nullopt, Expr::constant("p"));
  try {
    print_formula(f, PrintStyle::Thf);
    CHECK(false);
  } catch (const ToolError& e) {
    CHECK(e.code() == ErrorCode::StageMismatch);
  }
  Expr ho = Expr::lambda("X", types::boolean(), Expr::var("X"));
  try {
    print_formula(ho, PrintStyle::Nxf);
    CHECK(false);
  } catch (const ToolError& e) {
    CHECK(e.code() == ErrorCode::StageMismatch);
  }
}

TEST_CASE("associative chains flatten, non-associative operands get parentheses") {
  Problem p = parse_ok("tff(f,axiom, (p & q & r) => (p | q) ).");
  CHECK(print_formula(p.formulas[0].formula(), PrintStyle::Nxf) == "(p & q & r) => (p | q)");
  Problem nested = parse_ok("tff(f,axiom, (p => q) <=> r ).");
  CHECK(print_formula(nested.formulas[0].formula(), PrintStyle::Nxf) == "(p => q) <=> r");
}

TEST_CASE("negated equality prints as infix !=") {
  Problem p = parse_ok("tff(f,axiom, a != b ).");
  CHECK(print_formula(p.formulas[0].formula(), PrintStyle::Nxf) == "a != b");
  Problem q = parse_ok("tff(f,axiom, ~ (a = b) ).");
  CHECK(print_formula(q.formulas[0].formula(), PrintStyle::Nxf) == "a != b");
}

TEST_CASE("quantifier binder lists merge") {
  Problem p = parse_ok("tff(f,axiom, ! [X: $i, Y: $i] : r(X,Y) ).");
  CHECK(print_formula(p.formulas[0].formula(), PrintStyle::Nxf) == "! [X: $i, Y: $i]: r(X,Y)");
}

TEST_CASE("round-trips on a spread of NXF, NHF and THF inputs") {
  check_roundtrip("tff(f,axiom, ~ {$possible} @ (pigs_fly) ).");
  check_roundtrip(
      "tff(pigs_fly_decl,type, pigs_fly: $o ).\n"
      "tff(s,axiom, ? [P: $o] : ( {$necessary} @ (P) ) ).");
  check_roundtrip(
      "thf(positive_decl,type, positive: ($i > $o) > $o ).\n"
      "thf(self,axiom, {$necessary} @ ( positive @ ^ [X: $i] : (X = X) ) ).");
  check_roundtrip(
      "tff(simple_spec,logic, $modal == [ $domains == [ $constant, some_user_type == $varying ],"
      " $designation == $rigid, $modalities == $modal_system_S5 ] ).\n"
      "tff(c,conjecture, {$box} @ (p) ).");
  check_roundtrip(
      "thf(multi_spec,logic, $modal == [ $domains == $constant, $designation == $rigid,"
      " $modalities == [ $modal_system_K, {$box(#a)} == [ $modal_axiom_K, $modal_axiom_B ],"
      " {$box(#b)} == $modal_system_S4 ] ] ).\n"
      "thf(c,conjecture, {$box(#a)} @ p ).");
  check_roundtrip("tff(f,axiom, ! [X] : ( q(X) | ~ q(X) ) ).");
  check_roundtrip("thf(d,type, p: $i > $o ).\nthf(f,axiom, ! [X: $i]: (p @ X) ).");
  check_roundtrip("tff(f,axiom, $true & ~ $false ).");
  check_roundtrip("tff(f,axiom, p <~> (q <= r) ).");
  check_roundtrip("tff(f,hypothesis-global, {$dia} @ (p & q) ).");
}

TEST_CASE("wrapped lines stay within 120 columns and reparse") {
  std::ostringstream long_formula;
  long_formula << "tff(f,axiom, some_rather_long_predicate_name(a_long_constant_name)";
  for (int i = 0; i < 12; i++)
    long_formula << " & another_quite_long_predicate(second_constant_symbol_" << i << ")";
  long_formula << " ).";
  Problem p = parse_ok(long_formula.str());
  std::string printed = print_problem(p, PrintStyle::Nxf);
  std::istringstream lines(printed);
  std::string line;
  int count = 0;
  while (std::getline(lines, line)) {
    CHECK(line.size() <= 120);
    count++;
  }
  CHECK(count > 1);
  Problem again = parse_ok(printed);
  CHECK(Expr::identical(again.formulas[0].formula(), p.formulas[0].formula()));
  CHECK(print_problem(again, PrintStyle::Nxf) == printed);
}

TEST_CASE("natural_style picks the matching keyword family") {
  CHECK(natural_style(parse_ok("tff(f,axiom, {$box} @ (p) ).")) == PrintStyle::Nxf);
  CHECK(natural_style(parse_ok("thf(f,axiom, {$box} @ p ).")) == PrintStyle::Nhf);
  CHECK(natural_style(parse_ok("thf(d,type, p: $o ).\nthf(f,axiom, p ).")) == PrintStyle::Thf);
}

TEST_CASE("printer output is pure ASCII") {
  Problem p = parse_ok("tff(f,axiom, ! [X: $i] : ( {$box} @ (q(X)) ) ).");
  for (char c : print_problem(p, PrintStyle::Nxf)) CHECK(static_cast<unsigned char>(c) < 128);
}
