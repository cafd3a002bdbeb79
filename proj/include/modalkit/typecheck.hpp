// modalkit :: simple-type checking for source and target formulae

#ifndef MODALKIT_TYPECHECK_HPP_
#define MODALKIT_TYPECHECK_HPP_

#include <string>

#include "modalkit/syntax.hpp"

namespace modalkit {

// Computes the type of `f` under the signature and binder types. Unknown
// non-classical connectives are treated as boolean operators. Throws
// ToolError(TypeError) on ill-typed input and
// ToolError(UnassignedSymbol) for symbols missing from the signature.
Type type_of(const Expr& f, const Signature& sig);

// Checks every logical formula of the problem against its signature; each
// must have type $o. Definitions (`sym = body`) are checked like formulas.
void typecheck_problem(const Problem& p);

}  // namespace modalkit

#endif  // MODALKIT_TYPECHECK_HPP_
