// modalkit :: canonical generated formula corpora for the oracle

#ifndef MODALKIT_CORPUS_HPP_
#define MODALKIT_CORPUS_HPP_

#include <string>
#include <utility>
#include <vector>

#include "modalkit/logic_spec.hpp"
#include "modalkit/syntax.hpp"

namespace modalkit {

// All propositional modal formulas over atoms p, q (connectives ~ & | => <=>
// and box/dia), enumerated by size in a fixed order, restricted to the given
// modal depth, truncated to `count` entries.
std::vector<std::pair<std::string, Expr>> propositional_corpus(size_t count,
                                                               int max_modal_depth = 3);

// Closed monadic first-order modal formulas over one unary predicate q and
// one constant c, quantifier nesting at most 2 (variables X, Y), enumerated
// by size. The Barcan and converse Barcan formulas lead the corpus.
std::vector<std::pair<std::string, Expr>> monadic_corpus(size_t count, int max_modal_depth = 2);

Expr barcan_formula();           // (![X]: box q(X)) => box ![X]: q(X)
Expr converse_barcan_formula();  // box ![X]: q(X) => ![X]: box q(X)

// Characteristic propositional instance of an axiom scheme over atom p.
Expr scheme_instance(AxiomScheme scheme);

int quantifier_depth(const Expr& f);

}  // namespace modalkit

#endif  // MODALKIT_CORPUS_HPP_
