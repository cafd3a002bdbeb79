#include "modalkit/pipeline.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>

#include "modalkit/printer.hpp"

namespace modalkit {

namespace fs = std::filesystem;

LogicSpec resolve_spec(const Problem& problem, const TranslateOverrides& overrides) {
  LogicSpec spec;
  const LogicSpec* in_file = problem.logic_spec();
  if (in_file) {
    spec = *in_file;
  } else if (overrides.system && overrides.domains) {
    spec = make_logic_spec(*overrides.system, *overrides.domains,
                           overrides.designation.value_or(Designation::Rigid));
    return spec;
  } else {
    throw ToolError(ErrorCode::UnsupportedFeature,
                    "no logic specification: the file has none and --system/--domains were "
                    "not both given");
  }
  if (overrides.system) spec.modalities.default_schemes = expand_system(*overrides.system);
  if (overrides.domains) spec.default_domains = *overrides.domains;
  if (overrides.designation) spec.designation = *overrides.designation;
  return spec;
}

std::string translate_to_text(const Problem& problem, const LogicSpec& spec,
                              const EmbedOptions& options) {
  Problem embedded = embed_problem(problem, spec, options);
  std::string header;
  // Per-type domain constraints combined with several accessibility
  // relations: the monotonicity axioms are emitted once per relation.
  EmbeddingPlan pl = plan(problem, spec, options);
  bool non_constant = !pl.eiw_types.empty();
  if (non_constant && pl.indices.size() > 1 && !pl.s5u)
    header = "% domain monotonicity constraints are emitted relative to every "
             "accessibility relation\n";
  return header + print_problem(embedded, PrintStyle::Thf);
}

std::vector<std::string> default_systems() { return {"K", "D", "M", "S4", "S5"}; }

std::vector<DomainSemantics> default_domains() {
  return {DomainSemantics::Constant, DomainSemantics::Cumulative, DomainSemantics::Decreasing,
          DomainSemantics::Varying};
}

InjectResult inject_specs(const std::vector<std::string>& input_files,
                          const std::string& output_dir,
                          const std::vector<std::string>& systems,
                          const std::vector<DomainSemantics>& domains,
                          const ParseOptions& parse_options) {
  InjectResult result;
  fs::create_directories(output_dir);

  std::vector<std::string> inputs = input_files;
  std::sort(inputs.begin(), inputs.end());

  for (const std::string& input : inputs) {
    ParseResult parsed = parse_file(input, parse_options);
    if (!parsed.ok()) {
      std::string msg = "cannot parse '" + input + "'";
      for (const auto& d : parsed.diagnostics)
        if (d.severity == Severity::Error) { msg += ": " + d.render(); break; }
      throw ToolError(ErrorCode::UnsupportedFeature, msg);
    }
    Problem& problem = *parsed.problem;
    if (problem.logic_spec())
      throw ToolError(ErrorCode::UnsupportedFeature,
                      "'" + input + "' already contains a logic specification");

    std::string base = fs::path(input).stem().string();
    std::set<std::string> names;
    for (const auto& af : problem.formulas) names.insert(af.name);
    std::string spec_name = "logic_spec";
    for (int i = 1; names.count(spec_name); i++) spec_name = "logic_spec" + std::to_string(i);

    for (const std::string& system : systems) {
      for (DomainSemantics ds : domains) {
        Problem variant = problem;
        AnnotatedFormula spec_formula;
        spec_formula.keyword = FormKeyword::Tff;
        spec_formula.name = spec_name;
        spec_formula.role = Role{RoleBase::Logic, std::nullopt};
        spec_formula.content = make_logic_spec(system, ds);
        variant.formulas.insert(variant.formulas.begin(), std::move(spec_formula));

        std::string domains_name = domain_semantics_name(ds) + 1;  // strip '$'
        fs::path out_path = fs::path(output_dir) / (base + "." + system + "." + domains_name + ".p");
        std::ofstream out(out_path);
        if (!out)
          throw ToolError(ErrorCode::Internal, "cannot write '" + out_path.string() + "'");
        out << print_problem(variant, PrintStyle::Nxf);
        result.written.push_back(out_path.string());
      }
    }
  }
  return result;
}

}  // namespace modalkit
