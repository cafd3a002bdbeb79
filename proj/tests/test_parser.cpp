#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <random>

#include "modalkit/parser.hpp"
#include "modalkit/printer.hpp"

using namespace modalkit;
namespace fs = std::filesystem;

namespace {

Problem parse_ok(const std::string& text, SourceDialect dialect = SourceDialect::Auto) {
  ParseOptions opts;
  opts.dialect = dialect;
  ParseResult r = parse_problem(text, opts);
  if (!r.ok())
    for (const auto& d : r.diagnostics) MESSAGE(d.render());
  REQUIRE(r.ok());
  return *r.problem;
}

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() / ("modalkit-test-" + std::to_string(::getpid()) + "-" +
                                        std::to_string(counter++));
    fs::create_directories(path);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path, ec);
  }
  std::string file(const std::string& name, const std::string& content) const {
    fs::path p = path / name;
    std::ofstream out(p);
    out << content;
    return p.string();
  }
  static int counter;
};
int TempDir::counter = 0;

}  // namespace

TEST_CASE("negated possibility in NXF style") {
  Problem p = parse_ok("tff(f,axiom, ~ {$possible} @ (pigs_fly) ).");
  const Expr& f = p.formulas.front().formula();
  REQUIRE(f.kind() == ExprKind::Not);
  REQUIRE(f.body().kind() == ExprKind::Modal);
  CHECK(f.body().modal_op() == ModalOp::Dia);  // $possible is an alias of $dia
  CHECK_FALSE(f.body().modal_index().has_value());
  CHECK(f.body().body().kind() == ExprKind::Const);
  CHECK(f.body().body().name() == "pigs_fly");
}

TEST_CASE("indexed box in NHF style") {
  Problem p = parse_ok("thf(a,axiom, {$box(#a)} @ p ).");
  const Expr& f = p.formulas.front().formula();
  REQUIRE(f.kind() == ExprKind::Modal);
  CHECK(f.modal_op() == ModalOp::Box);
  REQUIRE(f.modal_index().has_value());
  CHECK(*f.modal_index() == "a");
  CHECK(p.formulas.front().language() == FormulaLanguage::NonClassicalHigherOrder);
}

TEST_CASE("syntax errors carry a location") {
  ParseResult r = parse_problem("tff(bad,axiom, p( ).");
  CHECK_FALSE(r.ok());
  REQUIRE(r.has_errors());
  const ParseDiagnostic& d = r.diagnostics.front();
  CHECK(d.severity == Severity::Error);
  CHECK(d.line == 1);
  CHECK(d.column >= 17);
}

TEST_CASE("parsing is total on noise") {
  std::mt19937 rng(123);
  const char alphabet[] = "tffqml(),.:=>&|~[]{}$#%'ab XY\n";
  for (int i = 0; i < 500; i++) {
    std::string s;
    int len = static_cast<int>(rng() % 160);
    for (int j = 0; j < len; j++) s += alphabet[rng() % (sizeof alphabet - 1)];
    ParseResult r = parse_problem(s);  // must not crash or hang
    if (!r.ok()) CHECK(r.has_errors());
  }
}

TEST_CASE("comments and whitespace do not affect the AST") {
  Problem a = parse_ok("tff(f,axiom, p => q ).");
  Problem b = parse_ok(
      "% leading comment\n  tff( f , axiom ,\n     p   =>   q /* inline */ )\n . % trailing");
  REQUIRE(b.formulas.size() == 1);
  CHECK(Expr::identical(a.formulas[0].formula(), b.formulas[0].formula()));
}

TEST_CASE("unknown connectives warn and are preserved") {
  ParseOptions opts;
  ParseResult r = parse_problem("tff(k,axiom, {$knows(#alice)} @ (~ pigs_fly) ).", opts);
  REQUIRE(r.ok());
  bool warned = false;
  for (const auto& d : r.diagnostics)
    warned = warned || (d.severity == Severity::Warning &&
                        d.message.find("$knows") != std::string::npos);
  CHECK(warned);
  const Expr& f = r.problem->formulas.front().formula();
  REQUIRE(f.kind() == ExprKind::NclApp);
  CHECK(f.name() == "$knows");
  REQUIRE(f.ncl_params().size() == 1);
  CHECK(f.ncl_params()[0].key == "#");
  CHECK(f.ncl_params()[0].values == std::vector<std::string>{"alice"});
  // prints back in the same shape
  CHECK(print_formula(f, PrintStyle::Nxf) == "{$knows(#alice)} @ (~ pigs_fly)");
}

TEST_CASE("parameterized connectives with key-value lists") {
  Problem p = parse_ok(
      "thf(c,axiom, {$common($agents := [alice,bob])} @ (positive) ).");
  const Expr& f = p.formulas.front().formula();
  REQUIRE(f.kind() == ExprKind::NclApp);
  REQUIRE(f.ncl_params().size() == 1);
  CHECK(f.ncl_params()[0].key == "$agents");
  CHECK(f.ncl_params()[0].list);
  CHECK(f.ncl_params()[0].values == std::vector<std::string>{"alice", "bob"});
}

TEST_CASE("in-file logic annotations resolve") {
  Problem p = parse_ok(
      "tff(s,logic, $modal == [ $domains == $varying, $designation == $rigid, "
      "$modalities == $modal_system_S4 ] ).\n"
      "tff(f,conjecture, {$box} @ (p) ).");
  REQUIRE(p.logic_spec() != nullptr);
  CHECK(p.logic_spec()->default_domains == DomainSemantics::Varying);
  CHECK(p.logic_spec()->modalities.default_schemes == expand_system("S4"));
}

TEST_CASE("source and useful_info fields are preserved verbatim") {
  std::string text =
      "tff(u,axiom, p, file('SET006+0.ax',union), [description('of union'), relevance(0.9)] ).";
  Problem p = parse_ok(text);
  CHECK(p.formulas[0].source == "file('SET006+0.ax',union)");
  CHECK(p.formulas[0].useful_info == "[description('of union'), relevance(0.9)]");
  std::string printed = print_annotated(p.formulas[0], PrintStyle::Nxf);
  Problem again = parse_ok(printed);
  CHECK(again.formulas[0].source == p.formulas[0].source);
  CHECK(again.formulas[0].useful_info == p.formulas[0].useful_info);
}

TEST_CASE("includes resolve relative to the include root with cycle detection") {
  TempDir dir;
  dir.file("axioms.ax", "tff(shared,axiom, base_fact ).\n");
  std::string main_path =
      dir.file("main.p", "include('axioms.ax').\ntff(g,conjecture, base_fact ).\n");
  ParseResult r = parse_file(main_path);
  REQUIRE(r.ok());
  CHECK(r.problem->formulas.size() == 2);
  CHECK(r.problem->formulas[0].name == "shared");

  ParseOptions opts;
  opts.include_root = dir.path.string();
  ParseResult r2 = parse_file(main_path, opts);
  REQUIRE(r2.ok());
  CHECK(r2.problem->formulas.size() == 2);

  // cycle
  dir.file("a.p", "include('b.p').\ntff(a,axiom, p ).\n");
  std::string b = dir.file("b.p", "include('a.p').\ntff(b,axiom, q ).\n");
  ParseResult cyc = parse_file(b);
  CHECK_FALSE(cyc.ok());
  bool cycle_reported = false;
  for (const auto& d : cyc.diagnostics)
    cycle_reported = cycle_reported || d.message.find("cycle") != std::string::npos;
  CHECK(cycle_reported);
}

TEST_CASE("oversized inputs are rejected") {
  ParseOptions opts;
  opts.max_bytes = 64;
  ParseResult r = parse_problem(std::string(1000, ' ') + "tff(f,axiom, p ).", opts);
  CHECK_FALSE(r.ok());
  CHECK(r.diagnostics.front().message.find("size limit") != std::string::npos);
}

TEST_CASE("qmf conversion: boxes become {$box} and axioms go local") {
  ParseResult r = convert_qmltp("qmf(a,axiom, #box : p ).");
  REQUIRE(r.ok());
  const Problem& p = *r.problem;
  // one declaration for p, then the formula
  REQUIRE(p.formulas.size() == 2);
  CHECK(p.formulas[0].is_type_decl());
  const AnnotatedFormula& af = p.formulas[1];
  CHECK(af.role.base == RoleBase::Axiom);
  REQUIRE(af.role.subrole.has_value());
  CHECK(*af.role.subrole == Locality::Local);
  REQUIRE(af.formula().kind() == ExprKind::Modal);
  CHECK(print_annotated(af, PrintStyle::Nxf) == "tff(a,axiom-local, {$box} @ (p) ).\n");
}

TEST_CASE("qmf conversion: conjecture keeps structure") {
  ParseResult r = convert_qmltp("qmf(c,conjecture, (#dia : p) => p ).");
  REQUIRE(r.ok());
  const AnnotatedFormula* con = r.problem->conjecture();
  REQUIRE(con != nullptr);
  const Expr& f = con->formula();
  REQUIRE(f.kind() == ExprKind::Binary);
  CHECK(f.op() == BinOp::Implies);
  CHECK(f.lhs().kind() == ExprKind::Modal);
  CHECK(f.lhs().modal_op() == ModalOp::Dia);
  CHECK(con->role.base == RoleBase::Conjecture);
  CHECK_FALSE(con->role.subrole.has_value());
}

TEST_CASE("qmf conversion: missing colon is an error") {
  ParseResult r = convert_qmltp("qmf(a,axiom, #box p ).");
  CHECK_FALSE(r.ok());
  CHECK(r.has_errors());
}

TEST_CASE("qmf conversion: untyped quantifiers land on $i") {
  ParseResult r = convert_qmltp("qmf(a,axiom, ! [X] : ( #box : p(X) ) ).");
  REQUIRE(r.ok());
  const Expr& f = r.problem->logical_formulas()[0]->formula();
  REQUIRE(f.kind() == ExprKind::Quant);
  CHECK(f.bound_type() == types::individual());
}

TEST_CASE("qmf conversion warns about interpreted equality") {
  ParseResult r = convert_qmltp("qmf(a,axiom, a = b ).");
  REQUIRE(r.ok());
  bool warned = false;
  for (const auto& d : r.diagnostics)
    warned = warned || (d.severity == Severity::Warning &&
                        d.message.find("equality") != std::string::npos);
  CHECK(warned);
}

TEST_CASE("qmf input is rejected outside the conversion entry") {
  ParseResult r = parse_problem("qmf(a,axiom, #box : p ).");
  CHECK_FALSE(r.ok());
  // and tff is rejected by convert_qmltp
  ParseResult c = convert_qmltp("tff(a,axiom, p ).");
  CHECK_FALSE(c.ok());
}

TEST_CASE("non-associative connectives must be parenthesized when mixed") {
  ParseResult r = parse_problem("tff(f,axiom, p => q <=> r ).");
  CHECK_FALSE(r.ok());
  ParseResult ok = parse_problem("tff(f,axiom, (p => q) <=> r ).");
  CHECK(ok.ok());
}

TEST_CASE("thf quantifiers require types, tff defaults to $i") {
  ParseResult bad = parse_problem("thf(f,axiom, ! [X] : p ).");
  CHECK_FALSE(bad.ok());
  Problem p = parse_ok("tff(f,axiom, ! [X] : q(X) ).");
  CHECK(p.formulas[0].formula().bound_type() == types::individual());
}
