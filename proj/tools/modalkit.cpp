// modalkit command-line interface: translation, spec injection, QMLTP
// conversion, oracle runs, and the external prover bridge.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>
#include <json.hpp>

#include "modalkit/corpus.hpp"
#include "modalkit/kripke.hpp"
#include "modalkit/parser.hpp"
#include "modalkit/pipeline.hpp"
#include "modalkit/printer.hpp"
#include "modalkit/runner.hpp"

namespace fs = std::filesystem;
using namespace modalkit;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitParse = 1;
constexpr int kExitUnsupported = 2;
constexpr int kExitInternal = 3;

int exit_code_for(const ToolError& e) {
  switch (e.code()) {
    case ErrorCode::UnsupportedFeature:
    case ErrorCode::UnhandledConnective:
    case ErrorCode::UnsupportedLogicFamily:
    case ErrorCode::UnknownSystem:
    case ErrorCode::MalformedProperty:
    case ErrorCode::BoundsTooLarge:
    case ErrorCode::UnsupportedFragment:
      return kExitUnsupported;
    case ErrorCode::ArityConflict:
    case ErrorCode::SortConflict:
    case ErrorCode::MissingConjecture:
      return kExitParse;
    default:
      return kExitInternal;
  }
}

void print_diagnostics(const std::vector<ParseDiagnostic>& diags) {
  for (const auto& d : diags) std::cerr << d.render() << "\n";
}

std::optional<DomainSemantics> parse_domains_flag(const std::string& s) {
  if (s == "constant") return DomainSemantics::Constant;
  if (s == "cumulative") return DomainSemantics::Cumulative;
  if (s == "decreasing") return DomainSemantics::Decreasing;
  if (s == "varying") return DomainSemantics::Varying;
  return std::nullopt;
}

std::string env_include_root() {
  const char* v = std::getenv("MODALKIT_INCLUDE_ROOT");
  return v ? v : "";
}

// Configuration file: a JSON object whose keys mirror the long option
// names; explicit flags take precedence.
nlohmann::json load_config(const std::string& path) {
  if (path.empty()) return nlohmann::json::object();
  std::ifstream in(path);
  if (!in) throw ToolError(ErrorCode::UnsupportedFeature, "cannot open config '" + path + "'");
  nlohmann::json j;
  in >> j;
  if (!j.is_object())
    throw ToolError(ErrorCode::MalformedProperty, "config must be a JSON object");
  return j;
}

template <typename T>
void config_default(const nlohmann::json& cfg, const CLI::Option* opt, const char* key, T& out) {
  if (opt != nullptr && opt->count() > 0) return;  // explicit flag wins
  if (cfg.contains(key)) out = cfg.at(key).get<T>();
}

std::vector<std::string> problem_files_in(const std::string& path) {
  std::vector<std::string> files;
  if (fs::is_directory(path)) {
    for (const auto& entry : fs::directory_iterator(path)) {
      if (!entry.is_regular_file()) continue;
      std::string ext = entry.path().extension().string();
      if (ext == ".p" || ext == ".ax" || ext == ".qmf") files.push_back(entry.path().string());
    }
    std::sort(files.begin(), files.end());
  } else {
    files.push_back(path);
  }
  return files;
}

void write_output(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path);
  if (!out) throw ToolError(ErrorCode::Internal, "cannot write '" + path + "'");
  out << text;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"modalkit: modal logic to higher-order logic translation toolchain"};
  app.require_subcommand(1);

  // --- translate -----------------------------------------------------------
  auto* translate = app.add_subcommand("translate", "embed a modal problem into THF");
  std::string tr_input, tr_output, tr_system, tr_domains, tr_designation, tr_include, tr_config;
  bool tr_s5u = false, tr_collapse = false, tr_defs = false;
  translate->add_option("input", tr_input, "problem file (NXF)")->required();
  auto* tr_out_opt = translate->add_option("-o,--output", tr_output, "output file (default stdout)");
  auto* tr_sys_opt = translate->add_option("--system", tr_system, "modal system override (K, D, M, S4, S5, ...)");
  auto* tr_dom_opt = translate->add_option("--domains", tr_domains, "domain semantics override");
  auto* tr_des_opt = translate->add_option("--designation", tr_designation, "designation override (rigid/flexible)");
  auto* tr_s5u_opt = translate->add_flag("--s5u", tr_s5u, "universal-relation rewrite for S5");
  auto* tr_col_opt = translate->add_flag("--s5-collapse", tr_collapse, "collapse cumulative/decreasing domains under S5");
  auto* tr_defs_opt = translate->add_flag("--defs", tr_defs, "emit named connective definitions");
  auto* tr_inc_opt = translate->add_option("--include-root", tr_include, "root for include(...) resolution");
  translate->add_option("--config", tr_config, "JSON config file (keys mirror the long options)");

  // --- inject-specs --------------------------------------------------------
  auto* inject = app.add_subcommand("inject-specs", "add logic specifications to NXF problems");
  std::string in_dir, out_dir;
  std::vector<std::string> in_systems;
  std::vector<std::string> in_domains;
  inject->add_option("input", in_dir, "input directory (or single file)")->required();
  inject->add_option("output", out_dir, "output directory")->required();
  inject->add_option("--systems", in_systems, "systems to inject (default K,D,M,S4,S5)")
      ->delimiter(',');
  inject->add_option("--domains", in_domains,
                     "domain semantics to inject (default constant,cumulative,decreasing,varying)")
      ->delimiter(',');

  // --- convert-qmltp -------------------------------------------------------
  auto* convert = app.add_subcommand("convert-qmltp", "convert QMLTP qmf syntax to NXF");
  std::string cv_input, cv_output;
  convert->add_option("input", cv_input, "QMLTP problem file")->required();
  convert->add_option("-o,--output", cv_output, "output file (default stdout)");

  // --- oracle --------------------------------------------------------------
  auto* oracle = app.add_subcommand("oracle", "cross-check the embedding against Kripke semantics");
  std::string or_input, or_corpus, or_system = "K", or_domains = "constant";
  int or_count = 100, or_max_worlds = 3, or_max_domain = 2, or_workers = 0;
  bool or_force = false, or_s5u = false;
  oracle->add_option("input", or_input, "problem file whose formulas are checked");
  oracle->add_option("--corpus", or_corpus, "generated corpus: propositional or monadic");
  oracle->add_option("--count", or_count, "corpus size (default 100)");
  oracle->add_option("--system", or_system, "modal system (default K)");
  oracle->add_option("--domains", or_domains, "domain semantics (default constant)");
  oracle->add_option("--max-worlds", or_max_worlds, "world bound (default 3)");
  oracle->add_option("--max-domain", or_max_domain, "carrier bound (default 2)");
  oracle->add_option("--workers", or_workers, "worker threads (default: cores)");
  oracle->add_flag("--force", or_force, "lift the practical bounds ceiling");
  oracle->add_flag("--s5u", or_s5u, "check the universal-relation embedding");

  // --- run -----------------------------------------------------------------
  auto* run = app.add_subcommand("run", "translate problems and drive SZS backends");
  std::string rn_problems, rn_report, rn_include, rn_config, rn_system, rn_domains;
  std::vector<std::string> rn_backends;
  double rn_timeout = 60.0;
  int rn_workers = 0;
  bool rn_s5u = false, rn_collapse = false;
  run->add_option("--problems", rn_problems, "problem file or directory")->required();
  auto* rn_back_opt = run->add_option("--backend", rn_backends,
                                      "backend command template containing {file}; repeatable");
  auto* rn_tmo_opt = run->add_option("--timeout", rn_timeout, "wall-clock seconds per invocation");
  auto* rn_rep_opt = run->add_option("--report", rn_report, "report file (default stdout)");
  auto* rn_wrk_opt = run->add_option("--workers", rn_workers, "worker threads (default: cores)");
  auto* rn_sys_opt = run->add_option("--system", rn_system, "modal system override");
  auto* rn_dom_opt = run->add_option("--domains", rn_domains, "domain semantics override");
  auto* rn_s5u_opt = run->add_flag("--s5u", rn_s5u, "universal-relation rewrite for S5");
  auto* rn_col_opt = run->add_flag("--s5-collapse", rn_collapse, "collapse domains under S5");
  auto* rn_inc_opt = run->add_option("--include-root", rn_include, "root for include(...) resolution");
  run->add_option("--config", rn_config, "JSON config file (keys mirror the long options)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*translate) {
      nlohmann::json cfg = load_config(tr_config);
      config_default(cfg, tr_out_opt, "output", tr_output);
      config_default(cfg, tr_sys_opt, "system", tr_system);
      config_default(cfg, tr_dom_opt, "domains", tr_domains);
      config_default(cfg, tr_des_opt, "designation", tr_designation);
      config_default(cfg, tr_s5u_opt, "s5u", tr_s5u);
      config_default(cfg, tr_col_opt, "s5-collapse", tr_collapse);
      config_default(cfg, tr_defs_opt, "defs", tr_defs);
      config_default(cfg, tr_inc_opt, "include-root", tr_include);

      ParseOptions popt;
      popt.include_root = tr_include.empty() ? env_include_root() : tr_include;
      ParseResult parsed = parse_file(tr_input, popt);
      print_diagnostics(parsed.diagnostics);
      if (!parsed.ok()) return kExitParse;

      TranslateOverrides overrides;
      if (!tr_system.empty()) overrides.system = tr_system;
      if (!tr_domains.empty()) {
        auto d = parse_domains_flag(tr_domains);
        if (!d) throw ToolError(ErrorCode::MalformedProperty,
                                "unknown domain semantics '" + tr_domains + "'");
        overrides.domains = d;
      }
      if (!tr_designation.empty()) {
        if (tr_designation == "rigid") overrides.designation = Designation::Rigid;
        else if (tr_designation == "flexible") overrides.designation = Designation::Flexible;
        else throw ToolError(ErrorCode::MalformedProperty,
                             "unknown designation '" + tr_designation + "'");
      }
      LogicSpec spec = resolve_spec(*parsed.problem, overrides);
      EmbedOptions eopt{tr_s5u, tr_collapse, tr_defs};
      write_output(tr_output, translate_to_text(*parsed.problem, spec, eopt));
      return kExitOk;
    }

    if (*inject) {
      std::vector<std::string> systems = in_systems.empty() ? default_systems() : in_systems;
      std::vector<DomainSemantics> domains;
      if (in_domains.empty()) {
        domains = default_domains();
      } else {
        for (const std::string& d : in_domains) {
          auto ds = parse_domains_flag(d);
          if (!ds) throw ToolError(ErrorCode::MalformedProperty,
                                   "unknown domain semantics '" + d + "'");
          domains.push_back(*ds);
        }
      }
      for (const std::string& s : systems) expand_system(s);  // validate early
      InjectResult result = inject_specs(problem_files_in(in_dir), out_dir, systems, domains);
      std::cout << result.written.size() << " file(s) written to " << out_dir << "\n";
      return kExitOk;
    }

    if (*convert) {
      ParseResult converted = convert_qmltp_file(cv_input);
      print_diagnostics(converted.diagnostics);
      if (!converted.ok()) return kExitParse;
      write_output(cv_output, print_problem(*converted.problem, PrintStyle::Nxf));
      return kExitOk;
    }

    if (*oracle) {
      auto domains = parse_domains_flag(or_domains);
      if (!domains)
        throw ToolError(ErrorCode::MalformedProperty,
                        "unknown domain semantics '" + or_domains + "'");
      LogicSpec spec = make_logic_spec(or_system, *domains);

      std::vector<std::pair<std::string, Expr>> formulas;
      if (!or_corpus.empty()) {
        if (or_corpus == "propositional")
          formulas = propositional_corpus(static_cast<size_t>(or_count));
        else if (or_corpus == "monadic")
          formulas = monadic_corpus(static_cast<size_t>(or_count));
        else
          throw ToolError(ErrorCode::UnsupportedFeature,
                          "unknown corpus '" + or_corpus + "' (propositional or monadic)");
      } else if (!or_input.empty()) {
        ParseResult parsed = parse_file(or_input);
        print_diagnostics(parsed.diagnostics);
        if (!parsed.ok()) return kExitParse;
        if (const LogicSpec* in_file = parsed.problem->logic_spec()) spec = *in_file;
        for (const AnnotatedFormula* af : parsed.problem->logical_formulas())
          formulas.emplace_back(af->name, af->formula());
      } else {
        throw ToolError(ErrorCode::UnsupportedFeature,
                        "oracle needs a problem file or --corpus");
      }

      OracleBounds bounds{or_max_worlds, or_max_domain, or_force};
      EmbedOptions eopt;
      eopt.s5u = or_s5u;
      CheckReport report = cross_check(formulas, spec, bounds, eopt, or_workers);
      std::cout << render_report_text(report);
      std::cout << render_report_json(report) << "\n";
      return report.ok() ? kExitOk : kExitParse;
    }

    if (*run) {
      nlohmann::json cfg = load_config(rn_config);
      config_default(cfg, rn_back_opt, "backend", rn_backends);
      config_default(cfg, rn_tmo_opt, "timeout", rn_timeout);
      config_default(cfg, rn_rep_opt, "report", rn_report);
      config_default(cfg, rn_wrk_opt, "workers", rn_workers);
      config_default(cfg, rn_sys_opt, "system", rn_system);
      config_default(cfg, rn_dom_opt, "domains", rn_domains);
      config_default(cfg, rn_s5u_opt, "s5u", rn_s5u);
      config_default(cfg, rn_col_opt, "s5-collapse", rn_collapse);
      config_default(cfg, rn_inc_opt, "include-root", rn_include);
      if (rn_backends.empty())
        throw ToolError(ErrorCode::UnsupportedFeature, "at least one --backend is required");

      RunConfig rc;
      rc.problems = problem_files_in(rn_problems);
      rc.backends = rn_backends;
      rc.timeout_seconds = rn_timeout;
      rc.workers = rn_workers;
      rc.include_root = rn_include.empty() ? env_include_root() : rn_include;
      rc.embed = EmbedOptions{rn_s5u, rn_collapse, false};
      if (!rn_system.empty()) rc.system_override = rn_system;
      if (!rn_domains.empty()) {
        auto d = parse_domains_flag(rn_domains);
        if (!d) throw ToolError(ErrorCode::MalformedProperty,
                                "unknown domain semantics '" + rn_domains + "'");
        rc.domains_override = d;
      }
      RunReport report = run_batch(rc);
      write_output(rn_report, render_run_report(report));
      return kExitOk;
    }
  } catch (const ToolError& e) {
    std::cerr << "modalkit: " << e.what() << "\n";
    return exit_code_for(e);
  } catch (const std::exception& e) {
    std::cerr << "modalkit: internal error: " << e.what() << "\n";
    return kExitInternal;
  }
  return kExitOk;
}
