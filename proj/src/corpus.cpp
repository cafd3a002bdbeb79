#include "modalkit/corpus.hpp"

#include <algorithm>
#include <map>

namespace modalkit {

namespace {

const std::vector<BinOp>& corpus_bin_ops() {
  static const std::vector<BinOp> ops = {BinOp::And, BinOp::Or, BinOp::Implies, BinOp::Iff};
  return ops;
}

// Formulas of exactly `size` nodes over atoms p, q.
const std::vector<Expr>& prop_of_size(int size) {
  static std::map<int, std::vector<Expr>> cache;
  auto it = cache.find(size);
  if (it != cache.end()) return it->second;
  std::vector<Expr> out;
  if (size == 1) {
    out.push_back(Expr::constant("p"));
    out.push_back(Expr::constant("q"));
  } else {
    for (const Expr& f : prop_of_size(size - 1)) {
      out.push_back(Expr::neg(f));
      out.push_back(Expr::modal(ModalOp::Box, std::nullopt, f));
      out.push_back(Expr::modal(ModalOp::Dia, std::nullopt, f));
    }
    for (int left = 1; left <= size - 2; left++) {
      for (BinOp op : corpus_bin_ops())
        for (const Expr& l : prop_of_size(left))
          for (const Expr& r : prop_of_size(size - 1 - left))
            out.push_back(Expr::binary(op, l, r));
    }
  }
  return cache.emplace(size, std::move(out)).first->second;
}

std::string var_name(int depth) { return depth == 1 ? "X" : "Y"; }

// Closed monadic formulas with `depth` quantified variables in scope.
const std::vector<Expr>& monadic_of_size(int size, int depth) {
  static std::map<std::pair<int, int>, std::vector<Expr>> cache;
  auto key = std::make_pair(size, depth);
  auto it = cache.find(key);
  if (it != cache.end()) return it->second;
  std::vector<Expr> out;
  if (size == 1) {
    out.push_back(Expr::app("q", {Expr::constant("c")}));
    for (int d = 1; d <= depth; d++) out.push_back(Expr::app("q", {Expr::var(var_name(d))}));
  } else {
    for (const Expr& f : monadic_of_size(size - 1, depth)) {
      out.push_back(Expr::neg(f));
      out.push_back(Expr::modal(ModalOp::Box, std::nullopt, f));
      out.push_back(Expr::modal(ModalOp::Dia, std::nullopt, f));
    }
    if (depth < 2) {
      for (const Expr& f : monadic_of_size(size - 1, depth + 1)) {
        out.push_back(Expr::quant(QuantKind::Forall, var_name(depth + 1), types::individual(), f));
        out.push_back(Expr::quant(QuantKind::Exists, var_name(depth + 1), types::individual(), f));
      }
    }
    for (int left = 1; left <= size - 2; left++) {
      for (BinOp op : corpus_bin_ops())
        for (const Expr& l : monadic_of_size(left, depth))
          for (const Expr& r : monadic_of_size(size - 1 - left, depth))
            out.push_back(Expr::binary(op, l, r));
    }
  }
  return cache.emplace(key, std::move(out)).first->second;
}

}  // namespace

std::vector<std::pair<std::string, Expr>> propositional_corpus(size_t count,
                                                               int max_modal_depth) {
  std::vector<std::pair<std::string, Expr>> out;
  for (int size = 1; out.size() < count && size <= 8; size++) {
    for (const Expr& f : prop_of_size(size)) {
      if (modal_depth(f) > max_modal_depth) continue;
      out.emplace_back("prop" + std::to_string(out.size()), f);
      if (out.size() >= count) break;
    }
  }
  return out;
}

std::vector<std::pair<std::string, Expr>> monadic_corpus(size_t count, int max_modal_depth) {
  std::vector<std::pair<std::string, Expr>> out;
  out.emplace_back("barcan", barcan_formula());
  out.emplace_back("converse_barcan", converse_barcan_formula());
  for (int size = 1; out.size() < count && size <= 7; size++) {
    for (const Expr& f : monadic_of_size(size, 0)) {
      if (modal_depth(f) > max_modal_depth) continue;
      out.emplace_back("fo" + std::to_string(out.size()), f);
      if (out.size() >= count) break;
    }
  }
  return out;
}

Expr barcan_formula() {
  Expr qx = Expr::app("q", {Expr::var("X")});
  Expr lhs = Expr::quant(QuantKind::Forall, "X", types::individual(),
                         Expr::modal(ModalOp::Box, std::nullopt, qx));
  Expr rhs = Expr::modal(ModalOp::Box, std::nullopt,
                         Expr::quant(QuantKind::Forall, "X", types::individual(), qx));
  return Expr::binary(BinOp::Implies, std::move(lhs), std::move(rhs));
}

Expr converse_barcan_formula() {
  Expr qx = Expr::app("q", {Expr::var("X")});
  Expr lhs = Expr::modal(ModalOp::Box, std::nullopt,
                         Expr::quant(QuantKind::Forall, "X", types::individual(), qx));
  Expr rhs = Expr::quant(QuantKind::Forall, "X", types::individual(),
                         Expr::modal(ModalOp::Box, std::nullopt, qx));
  return Expr::binary(BinOp::Implies, std::move(lhs), std::move(rhs));
}

Expr scheme_instance(AxiomScheme scheme) {
  Expr p = Expr::constant("p");
  auto box = [](Expr f) { return Expr::modal(ModalOp::Box, std::nullopt, std::move(f)); };
  auto dia = [](Expr f) { return Expr::modal(ModalOp::Dia, std::nullopt, std::move(f)); };
  switch (scheme) {
    case AxiomScheme::K:
      // box(p => q) => (box p => box q)
      return Expr::binary(
          BinOp::Implies,
          box(Expr::binary(BinOp::Implies, p, Expr::constant("q"))),
          Expr::binary(BinOp::Implies, box(p), box(Expr::constant("q"))));
    case AxiomScheme::D:
      return Expr::binary(BinOp::Implies, box(p), dia(p));
    case AxiomScheme::T:
      return Expr::binary(BinOp::Implies, box(p), p);
    case AxiomScheme::B:
      return Expr::binary(BinOp::Implies, p, box(dia(p)));
    case AxiomScheme::Four:
      return Expr::binary(BinOp::Implies, box(p), box(box(p)));
    case AxiomScheme::Five:
      return Expr::binary(BinOp::Implies, dia(p), box(dia(p)));
  }
  throw ToolError(ErrorCode::Internal, "unknown axiom scheme");
}

int quantifier_depth(const Expr& f) {
  switch (f.kind()) {
    case ExprKind::Var:
    case ExprKind::Const:
    case ExprKind::Truth:
      return 0;
    case ExprKind::App:
    case ExprKind::NclApp: {
      int d = 0;
      for (const Expr& a : f.args()) d = std::max(d, quantifier_depth(a));
      return d;
    }
    case ExprKind::Eq:
    case ExprKind::Binary:
    case ExprKind::Apply:
      return std::max(quantifier_depth(f.args()[0]), quantifier_depth(f.args()[1]));
    case ExprKind::Not:
    case ExprKind::Modal:
      return quantifier_depth(f.body());
    case ExprKind::Quant:
      return 1 + quantifier_depth(f.body());
    case ExprKind::Lambda:
      return quantifier_depth(f.body());
  }
  return 0;
}

}  // namespace modalkit
