#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sys/stat.h>
#include <sys/wait.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

using namespace std;
namespace fs = std::filesystem;

namespace {

struct CliResult {
  int exit_code;
  std::string output;  // stdout + stderr
};

CliResult run_cli(const std::string& args) {
  std::string cmd = std::string(MODALKIT_CLI_PATH) + " " + args + " 2>&1";
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  CliResult r;
  char buf[4096];
  size_t n;
  while ((n = fread(buf, 1, sizeof buf, pipe)) > 0) r.output.append(buf, n);
  int status = pclose(pipe);
  r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() /
           ("modalkit-cli-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
    fs::create_directories(path);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path, ec);
  }
  std::string file(const std::string& name, const std::string& content, bool exec = false) {
    fs::path p = path / name;
    std::ofstream out(p);
    out << content;
    out.close();
    if (exec) ::chmod(p.c_str(), 0755);
    return p.string();
  }
  static int counter;
};
int TempDir::counter = 0;

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("translate: default path uses the in-file specification") {
  TempDir dir;
  std::string input = dir.file("good.p",
                               "tff(spec,logic, $modal == [ $domains == $constant, "
                               "$designation == $rigid, $modalities == $modal_system_M ] ).\n"
                               "tff(con,conjecture, ({$box} @ (p)) => p ).\n");
  CliResult r = run_cli("translate " + input);
  CHECK(r.exit_code == 0);
  CHECK(r.output.find("emb__rel_reflexive") != std::string::npos);
  CHECK(r.output.find("thf(con,conjecture") != std::string::npos);
}

TEST_CASE("translate: flag overrides and optimization switches") {
  TempDir dir;
  std::string input = dir.file("plain.p", "tff(con,conjecture, ({$box} @ (p)) => p ).\n");
  std::string out = (dir.path / "out.thf").string();
  CliResult r = run_cli("translate " + input + " --system S5 --domains cumulative --s5u -o " + out);
  CHECK(r.exit_code == 0);
  std::string text = read_file(out);
  // universal relation: no accessibility symbol at all
  CHECK(text.find("emb__rel") == std::string::npos);
  // cumulative without --s5-collapse keeps the eiw machinery off propositional
  // problems but monotonicity needs a relation; here there are no individuals
  CHECK(text.find("conjecture") != std::string::npos);
}

TEST_CASE("translate: flexible designation exits 2") {
  TempDir dir;
  std::string input = dir.file("good.p", "tff(con,conjecture, ({$box} @ (p)) => p ).\n");
  CliResult r = run_cli("translate " + input + " --system K --domains constant --designation flexible");
  CHECK(r.exit_code == 2);
}

TEST_CASE("translate: parse errors exit 1") {
  TempDir dir;
  std::string input = dir.file("bad.p", "tff(oops,axiom, p( ).\n");
  CliResult r = run_cli("translate " + input);
  CHECK(r.exit_code == 1);
  CHECK(r.output.find("error") != std::string::npos);
}

TEST_CASE("translate: config file provides defaults, flags beat it") {
  TempDir dir;
  std::string input = dir.file("plain.p", "tff(con,conjecture, ({$box} @ (p)) => p ).\n");
  std::string cfg = dir.file("cfg.json", "{\"system\": \"M\", \"domains\": \"constant\"}");
  CliResult defaulted = run_cli("translate " + input + " --config " + cfg);
  CHECK(defaulted.exit_code == 0);
  CHECK(defaulted.output.find("emb__rel_reflexive") != std::string::npos);
  CliResult overridden = run_cli("translate " + input + " --config " + cfg + " --system S4");
  CHECK(overridden.exit_code == 0);
  CHECK(overridden.output.find("emb__rel_transitive") != std::string::npos);
}

TEST_CASE("inject-specs: default matrix yields 20 variants per problem") {
  TempDir dir;
  fs::create_directories(dir.path / "in");
  dir.file("in/prob.p", "tff(con,conjecture, ({$box} @ (p)) => p ).\n");
  std::string out_dir = (dir.path / "out").string();
  CliResult r = run_cli("inject-specs " + (dir.path / "in").string() + " " + out_dir);
  CHECK(r.exit_code == 0);
  size_t count = 0;
  for (const auto& e : fs::directory_iterator(out_dir)) {
    (void)e;
    count++;
  }
  CHECK(count == 20);
  CHECK(fs::exists(fs::path(out_dir) / "prob.S5.constant.p"));
  CHECK(fs::exists(fs::path(out_dir) / "prob.K.varying.p"));
}

TEST_CASE("inject-specs: restricted matrix") {
  TempDir dir;
  fs::create_directories(dir.path / "in");
  dir.file("in/a.p", "tff(c,conjecture, {$box} @ (p) ).\n");
  dir.file("in/b.p", "tff(c,conjecture, {$dia} @ (p) ).\n");
  dir.file("in/c.p", "tff(c,conjecture, p ).\n");
  std::string out_dir = (dir.path / "out").string();
  CliResult r = run_cli("inject-specs " + (dir.path / "in").string() + " " + out_dir +
                        " --systems K --domains varying");
  CHECK(r.exit_code == 0);
  size_t count = 0;
  for (const auto& e : fs::directory_iterator(out_dir)) {
    (void)e;
    count++;
  }
  CHECK(count == 3);
}

TEST_CASE("inject-specs: refuses problems that already carry a spec") {
  TempDir dir;
  fs::create_directories(dir.path / "in");
  dir.file("in/has_spec.p",
           "tff(s,logic, $modal == [ $domains == $constant, $designation == $rigid, "
           "$modalities == $modal_system_K ] ).\n"
           "tff(c,conjecture, p ).\n");
  CliResult r =
      run_cli("inject-specs " + (dir.path / "in").string() + " " + (dir.path / "out").string());
  CHECK(r.exit_code == 2);
}

TEST_CASE("convert-qmltp: happy path and error path") {
  TempDir dir;
  std::string qmf = dir.file("prob.qmf", "qmf(a,axiom, #box : p ).\nqmf(c,conjecture, p ).\n");
  CliResult ok = run_cli("convert-qmltp " + qmf);
  CHECK(ok.exit_code == 0);
  CHECK(ok.output.find("tff(a,axiom-local, {$box} @ (p) ).") != std::string::npos);

  std::string nxf = dir.file("already.p", "tff(a,axiom, {$box} @ (p) ).\n");
  CliResult bad = run_cli("convert-qmltp " + nxf);
  CHECK(bad.exit_code == 1);

  std::string eq = dir.file("eq.qmf", "qmf(a,axiom, a = b ).\nqmf(c,conjecture, a = a ).\n");
  CliResult warn = run_cli("convert-qmltp " + eq);
  CHECK(warn.exit_code == 0);
  CHECK(warn.output.find("equality") != std::string::npos);
}

TEST_CASE("oracle: corpus run exits 0 on agreement") {
  CliResult r = run_cli("oracle --corpus propositional --count 40 --system K "
                        "--domains constant --max-worlds 2 --workers 2");
  CHECK(r.exit_code == 0);
  CHECK(r.output.find("0 mismatch") != std::string::npos);
}

TEST_CASE("oracle: dyadic predicates are outside the fragment") {
  TempDir dir;
  std::string input = dir.file("dyadic.p", "tff(f,axiom, r(a,b) ).\n");
  CliResult r = run_cli("oracle " + input);
  CHECK(r.exit_code == 2);
}

TEST_CASE("oracle: barcan discipline from a file") {
  TempDir dir;
  std::string input = dir.file("barcan.p",
                               "tff(barcan,axiom, ( ! [X: $i] : ( {$box} @ (q(X)) ) ) "
                               "=> ( {$box} @ (! [X: $i] : q(X)) ) ).\n");
  CliResult cumulative = run_cli("oracle " + input + " --system K --domains cumulative");
  CHECK(cumulative.exit_code == 0);
  CHECK(cumulative.output.find("countermodel") != std::string::npos);
  CliResult decreasing = run_cli("oracle " + input + " --system K --domains decreasing");
  CHECK(decreasing.exit_code == 0);
  CHECK(decreasing.output.find("valid on all checked models") != std::string::npos);
}

TEST_CASE("run: stub backend produces a complete report") {
  TempDir dir;
  fs::create_directories(dir.path / "probs");
  dir.file("probs/p1.p",
           "tff(spec,logic, $modal == [ $domains == $constant, $designation == $rigid, "
           "$modalities == $modal_system_S5 ] ).\n"
           "tff(con,conjecture, ({$box} @ (p)) => p ).\n");
  dir.file("probs/p2.p",
           "tff(spec,logic, $modal == [ $domains == $varying, $designation == $rigid, "
           "$modalities == $modal_system_K ] ).\n"
           "tff(con,conjecture, p | ~ p ).\n");
  std::string stub = dir.file("stub.sh", "#!/bin/sh\necho '% SZS status Theorem'\n", true);
  std::string report_path = (dir.path / "report.tsv").string();
  CliResult r = run_cli("run --problems " + (dir.path / "probs").string() + " --backend '" +
                        stub + " {file}' --timeout 5 --report " + report_path + " --workers 2");
  CHECK(r.exit_code == 0);
  std::string report = read_file(report_path);
  CHECK(report.find("S5.constant") != std::string::npos);
  CHECK(report.find("K.varying") != std::string::npos);
  CHECK(report.find("p1.p") != std::string::npos);
  CHECK(report.find("p2.p") != std::string::npos);
  CHECK(report.find("Theorem") != std::string::npos);
}

TEST_CASE("include root comes from the environment when not given") {
  TempDir dir;
  fs::create_directories(dir.path / "axioms");
  dir.file("axioms/base.ax", "tff(base,axiom, p ).\n");
  std::string input = dir.file("main.p",
                               "include('axioms/base.ax').\n"
                               "tff(con,conjecture, {$box} @ (p) ).\n");
  // resolved relative to the file's directory even without the env var
  CliResult r = run_cli("translate " + input + " --system K --domains constant");
  CHECK(r.exit_code == 0);
  CHECK(r.output.find("thf(base,axiom") != std::string::npos);
}
