// modalkit :: deterministic TPTP-conformant serialization

#ifndef MODALKIT_PRINTER_HPP_
#define MODALKIT_PRINTER_HPP_

#include <string>

#include "modalkit/syntax.hpp"

namespace modalkit {

enum class PrintStyle {
  Nxf,  // tff keyword, {$box} @ (arg) application, no higher-order nodes
  Nhf,  // thf keyword, curried {$box} @ arg, higher-order nodes allowed
  Thf,  // thf keyword, classical content only (no modal connectives)
};

// Serializes a problem; the printer is a fixpoint: parsing the output and
// printing again reproduces it byte for byte. Throws
// ToolError(StageMismatch) when content does not fit the style.
std::string print_problem(const Problem& p, PrintStyle style);

std::string print_annotated(const AnnotatedFormula& af, PrintStyle style);
std::string print_formula(const Expr& f, PrintStyle style);
std::string print_logic_spec(const LogicSpec& spec);

// The style whose keyword set matches the problem's formulas (thf anywhere
// wins); used by round-trip drivers and the CLI.
PrintStyle natural_style(const Problem& p);

}  // namespace modalkit

#endif  // MODALKIT_PRINTER_HPP_
