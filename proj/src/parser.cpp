#include "modalkit/parser.hpp"

#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>

#include "lexer.hpp"

namespace modalkit {

namespace {

using detail::Tok;
using detail::Token;
using detail::token_kind_name;

namespace fs = std::filesystem;

// Internal control-flow exception; converted to diagnostics at the formula
// boundary so parsing stays total.
struct LocalError {
  int line;
  int column;
  std::string message;
};

enum class Mode { Fo, Ho, Qmf };

// ---------------------------------------------------------------------------
// Generic logic-specification values

struct SpecValue {
  bool is_list = false;
  std::string term;  // leaf
  struct Entry {
    std::string key;                       // bare term when !value
    std::optional<std::string> key_index;  // for {$box(#a)} keys
    std::shared_ptr<SpecValue> value;      // null for bare term entries
  };
  std::vector<Entry> entries;
};

SchemeSet schemes_from_spec_value(const SpecValue& v) {
  SchemeSet out;
  if (!v.is_list) return expand_system(v.term);
  for (const auto& e : v.entries) {
    if (e.value)
      throw ToolError(ErrorCode::MalformedProperty,
                      "unexpected key-value entry in modality scheme list");
    SchemeSet s = expand_system(e.key);
    out.insert(s.begin(), s.end());
  }
  if (out.empty())
    throw ToolError(ErrorCode::MalformedProperty, "empty modality scheme list");
  return out;
}

DomainSemantics domain_from_token(const std::string& token) {
  if (token == "$constant") return DomainSemantics::Constant;
  if (token == "$cumulative") return DomainSemantics::Cumulative;
  if (token == "$decreasing") return DomainSemantics::Decreasing;
  if (token == "$varying") return DomainSemantics::Varying;
  throw ToolError(ErrorCode::MalformedProperty, "unknown domain semantics '" + token + "'");
}

LogicSpec resolve_logic_spec(const std::string& family, const SpecValue& value) {
  if (family != "$modal")
    throw ToolError(ErrorCode::UnsupportedLogicFamily,
                    "logic family '" + family + "' is not supported (expected $modal)");
  if (!value.is_list)
    throw ToolError(ErrorCode::MalformedProperty, "$modal expects a property list");

  LogicSpec spec;
  bool have_domains = false, have_designation = false, have_modalities = false;
  for (const auto& entry : value.entries) {
    if (!entry.value)
      throw ToolError(ErrorCode::MalformedProperty,
                      "expected key == value entry in $modal property list");
    const SpecValue& v = *entry.value;
    if (entry.key == "$domains") {
      have_domains = true;
      if (!v.is_list) {
        spec.default_domains = domain_from_token(v.term);
        continue;
      }
      bool saw_default = false;
      for (const auto& e : v.entries) {
        if (!e.value) {
          if (saw_default)
            throw ToolError(ErrorCode::MalformedProperty, "$domains has multiple defaults");
          saw_default = true;
          spec.default_domains = domain_from_token(e.key);
        } else {
          if (e.value->is_list)
            throw ToolError(ErrorCode::MalformedProperty, "per-type domain value must be a term");
          spec.domain_overrides[e.key] = domain_from_token(e.value->term);
        }
      }
      if (!saw_default)
        throw ToolError(ErrorCode::MalformedProperty, "$domains list lacks a default value");
    } else if (entry.key == "$designation") {
      have_designation = true;
      if (v.is_list)
        throw ToolError(ErrorCode::MalformedProperty, "$designation must be a term");
      if (v.term == "$rigid") spec.designation = Designation::Rigid;
      else if (v.term == "$flexible") spec.designation = Designation::Flexible;
      else
        throw ToolError(ErrorCode::MalformedProperty, "unknown designation '" + v.term + "'");
    } else if (entry.key == "$modalities") {
      have_modalities = true;
      if (!v.is_list) {
        spec.modalities.default_schemes = expand_system(v.term);
        continue;
      }
      SchemeSet defaults;
      bool saw_kv = false;
      for (const auto& e : v.entries) {
        if (!e.value) {
          if (saw_kv)
            throw ToolError(ErrorCode::MalformedProperty,
                            "default modality terms must precede per-index entries");
          SchemeSet s = expand_system(e.key);
          defaults.insert(s.begin(), s.end());
        } else {
          saw_kv = true;
          if (e.key != "$box" && e.key != "$dia")
            throw ToolError(ErrorCode::MalformedProperty,
                            "per-index modality key must be {$box(#i)} or {$dia(#i)}");
          SchemeSet s = schemes_from_spec_value(*e.value);
          if (e.key_index) spec.modalities.per_index[*e.key_index] = std::move(s);
          else defaults = std::move(s);
        }
      }
      if (defaults.empty())
        throw ToolError(ErrorCode::MalformedProperty, "$modalities lacks a default value");
      spec.modalities.default_schemes = std::move(defaults);
    } else if (entry.key == "$consequence") {
      if (v.is_list || v.term == "$global")
        throw ToolError(ErrorCode::UnsupportedFeature,
                        "only local consequence is supported; use subroles for global premises");
      if (v.term != "$local")
        throw ToolError(ErrorCode::MalformedProperty, "unknown consequence '" + v.term + "'");
    } else {
      throw ToolError(ErrorCode::MalformedProperty,
                      "unknown $modal property '" + entry.key + "'");
    }
  }
  if (!have_domains || !have_designation || !have_modalities)
    throw ToolError(ErrorCode::MalformedProperty,
                    "$modal specification must define $domains, $designation and $modalities");
  return spec;
}

// ---------------------------------------------------------------------------
// Parser

struct IncludeContext {
  std::vector<std::string> stack;  // canonical paths currently open
};

struct Parser {
  const ParseOptions& options;
  std::vector<ParseDiagnostic>& diags;
  std::string_view text;
  std::vector<Token> toks;
  size_t pos = 0;
  std::string current_dir;
  IncludeContext* includes = nullptr;

  Parser(const ParseOptions& opts, std::vector<ParseDiagnostic>& d, std::string_view t)
      : options(opts), diags(d), text(t) {
    toks = detail::lex(text, diags);
  }

  const Token& cur() const { return toks[pos]; }
  const Token& peek(size_t ahead = 1) const {
    size_t i = pos + ahead;
    return i < toks.size() ? toks[i] : toks.back();
  }
  bool at(Tok k) const { return cur().kind == k; }
  Token advance() { return toks[pos < toks.size() - 1 ? pos++ : pos]; }

  [[noreturn]] void fail(const Token& t, std::string msg) const {
    throw LocalError{t.line, t.column, std::move(msg)};
  }

  Token expect(Tok k, const char* context) {
    if (!at(k))
      fail(cur(), std::string("expected ") + token_kind_name(k) + " " + context + ", found " +
                      token_kind_name(cur().kind) +
                      (cur().text.empty() ? "" : " '" + cur().text + "'"));
    return advance();
  }

  bool accept(Tok k) {
    if (!at(k)) return false;
    advance();
    return true;
  }

  // ---- types ------------------------------------------------------------

  Type parse_type() {
    Type lhs = parse_type_atom();
    if (accept(Tok::Gt)) return Type::fun(lhs, parse_type());
    return lhs;
  }

  Type parse_type_atom() {
    if (at(Tok::DollarWord)) {
      Token t = advance();
      if (t.text == "$i" || t.text == "$o" || t.text == "$tType") return Type::base(t.text);
      fail(t, "unsupported defined type '" + t.text + "'");
    }
    if (at(Tok::LowerWord) || at(Tok::Quoted)) return Type::base(unquote(advance().text));
    if (accept(Tok::LParen)) {
      Type t = parse_type();
      expect(Tok::RParen, "after type");
      return t;
    }
    fail(cur(), "expected a type");
  }

  static std::string unquote(const std::string& s) {
    if (s.size() >= 2 && s.front() == '\'' && s.back() == '\'') {
      std::string out;
      for (size_t i = 1; i + 1 < s.size(); i++) {
        if (s[i] == '\\' && i + 2 < s.size()) i++;
        out += s[i];
      }
      return out;
    }
    return s;
  }

  // ---- non-classical connectives -----------------------------------------

  struct NclHead {
    std::string name;
    std::optional<std::string> index;
    std::vector<NclParam> params;
    Token start;
  };

  NclHead parse_ncl_head() {
    NclHead head;
    head.start = expect(Tok::LBrace, "to open a non-classical connective");
    Token name = expect(Tok::DollarWord, "as connective name");
    head.name = name.text;
    if (accept(Tok::LParen)) {
      bool first = true;
      while (!at(Tok::RParen)) {
        if (!first) expect(Tok::Comma, "between connective parameters");
        first = false;
        if (at(Tok::HashWord)) {
          Token idx = advance();
          NclParam p;
          p.key = "#";
          p.values.push_back(idx.text.substr(1));
          if (!head.index) head.index = idx.text.substr(1);
          head.params.push_back(std::move(p));
          continue;
        }
        Token key = advance();
        if (key.kind != Tok::DollarWord && key.kind != Tok::LowerWord)
          fail(key, "expected connective parameter");
        expect(Tok::Assign, "in connective parameter");
        NclParam p;
        p.key = key.text;
        if (accept(Tok::LBracket)) {
          p.list = true;
          bool f2 = true;
          while (!at(Tok::RBracket)) {
            if (!f2) expect(Tok::Comma, "in parameter list");
            f2 = false;
            p.values.push_back(advance().text);
          }
          expect(Tok::RBracket, "after parameter list");
        } else {
          p.values.push_back(advance().text);
        }
        head.params.push_back(std::move(p));
      }
      expect(Tok::RParen, "after connective parameters");
    }
    expect(Tok::RBrace, "to close the connective");
    return head;
  }

  Expr make_ncl(const NclHead& head, std::vector<Expr> args) {
    bool box = head.name == "$box" || head.name == "$necessary";
    bool dia = head.name == "$dia" || head.name == "$possible";
    if (box || dia) {
      if (args.size() != 1)
        fail(head.start, head.name + " expects exactly one argument");
      return Expr::modal(box ? ModalOp::Box : ModalOp::Dia, head.index, std::move(args[0]));
    }
    diags.push_back({Severity::Warning, head.start.line, head.start.column,
                     "unknown non-classical connective '{" + head.name +
                         "}' (kept verbatim; the embedding will reject it)"});
    return Expr::ncl(head.name, head.params, std::move(args));
  }

  // ---- formulas -----------------------------------------------------------

  Expr parse_formula(Mode m) {
    Expr lhs = parse_disj(m);
    if (at(Tok::Arrow) || at(Tok::RevArrow) || at(Tok::Iff) || at(Tok::NotIff)) {
      Token op = advance();
      Expr rhs = parse_disj(m);
      if (at(Tok::Arrow) || at(Tok::RevArrow) || at(Tok::Iff) || at(Tok::NotIff))
        fail(cur(), "mixed non-associative connectives require parentheses");
      BinOp b = op.kind == Tok::Arrow      ? BinOp::Implies
                : op.kind == Tok::RevArrow ? BinOp::ImpliedBy
                : op.kind == Tok::Iff      ? BinOp::Iff
                                           : BinOp::Xor;
      return Expr::binary(b, std::move(lhs), std::move(rhs));
    }
    return lhs;
  }

  Expr parse_disj(Mode m) {
    Expr lhs = parse_conj(m);
    while (accept(Tok::Vline)) lhs = Expr::binary(BinOp::Or, std::move(lhs), parse_conj(m));
    return lhs;
  }

  Expr parse_conj(Mode m) {
    Expr lhs = parse_unit(m);
    while (accept(Tok::Amp)) lhs = Expr::binary(BinOp::And, std::move(lhs), parse_unit(m));
    return lhs;
  }

  Expr parse_unit(Mode m) {
    if (accept(Tok::Tilde)) return Expr::neg(parse_unit(m));
    if (at(Tok::Bang) || at(Tok::Question)) return parse_quantified(m);
    if (at(Tok::Caret)) {
      if (m != Mode::Ho) fail(cur(), "lambda abstraction is only allowed in thf formulas");
      return parse_lambda();
    }
    if (at(Tok::HashWord) && m == Mode::Qmf) {
      Token t = advance();
      if (t.text != "#box" && t.text != "#dia")
        fail(t, "unknown modal prefix '" + t.text + "'");
      expect(Tok::Colon, "after modal prefix");
      Expr body = parse_unit(m);
      return Expr::modal(t.text == "#box" ? ModalOp::Box : ModalOp::Dia, std::nullopt,
                         std::move(body));
    }
    return parse_atomic(m);
  }

  Expr parse_quantified(Mode m) {
    Token q = advance();
    QuantKind kind = q.kind == Tok::Bang ? QuantKind::Forall : QuantKind::Exists;
    expect(Tok::LBracket, "after quantifier");
    std::vector<std::pair<std::string, Type>> binders;
    bool first = true;
    while (!at(Tok::RBracket)) {
      if (!first) expect(Tok::Comma, "between bound variables");
      first = false;
      Token v = expect(Tok::UpperWord, "as bound variable");
      Type t = types::individual();
      if (accept(Tok::Colon)) t = parse_type();
      else if (m == Mode::Ho)
        fail(v, "thf bound variables must be typed");
      binders.emplace_back(v.text, std::move(t));
    }
    expect(Tok::RBracket, "after bound variables");
    expect(Tok::Colon, "after quantifier binder");
    Expr body = parse_unit(m);
    for (auto it = binders.rbegin(); it != binders.rend(); ++it)
      body = Expr::quant(kind, it->first, it->second, std::move(body));
    return body;
  }

  Expr parse_lambda() {
    expect(Tok::Caret, "for lambda");
    expect(Tok::LBracket, "after '^'");
    std::vector<std::pair<std::string, Type>> binders;
    bool first = true;
    while (!at(Tok::RBracket)) {
      if (!first) expect(Tok::Comma, "between lambda binders");
      first = false;
      Token v = expect(Tok::UpperWord, "as lambda binder");
      expect(Tok::Colon, "after lambda binder");
      binders.emplace_back(v.text, parse_type());
    }
    expect(Tok::RBracket, "after lambda binders");
    expect(Tok::Colon, "after lambda binder list");
    Expr body = parse_unit(Mode::Ho);
    for (auto it = binders.rbegin(); it != binders.rend(); ++it)
      body = Expr::lambda(it->first, it->second, std::move(body));
    return body;
  }

  Expr parse_atomic(Mode m) {
    if (m == Mode::Ho) {
      Expr lhs = parse_apply_chain();
      if (at(Tok::Eq) || at(Tok::Neq)) {
        bool neq = advance().kind == Tok::Neq;
        Expr rhs = parse_apply_chain();
        Expr e = Expr::eq(std::move(lhs), std::move(rhs));
        return neq ? Expr::neg(std::move(e)) : e;
      }
      return lhs;
    }
    Expr lhs = parse_fo_primary(m);
    if (at(Tok::Eq) || at(Tok::Neq)) {
      bool neq = advance().kind == Tok::Neq;
      Expr rhs = parse_fo_primary(m);
      Expr e = Expr::eq(std::move(lhs), std::move(rhs));
      return neq ? Expr::neg(std::move(e)) : e;
    }
    return lhs;
  }

  Expr parse_apply_chain() {
    Expr head = parse_primary(Mode::Ho);
    while (accept(Tok::At)) head = Expr::apply(std::move(head), parse_primary(Mode::Ho));
    return head;
  }

  Expr parse_fo_primary(Mode m) {
    if (at(Tok::LBrace)) {
      NclHead head = parse_ncl_head();
      expect(Tok::At, "after non-classical connective");
      expect(Tok::LParen, "around non-classical connective arguments");
      std::vector<Expr> args;
      args.push_back(parse_formula(m));
      while (accept(Tok::Comma)) args.push_back(parse_formula(m));
      expect(Tok::RParen, "after non-classical connective arguments");
      return make_ncl(head, std::move(args));
    }
    return parse_primary(m);
  }

  Expr parse_primary(Mode m) {
    if (accept(Tok::LParen)) {
      Expr f = parse_formula(m);
      expect(Tok::RParen, "to close '('");
      return f;
    }
    if (at(Tok::LBrace)) {
      if (m != Mode::Ho) return parse_fo_primary(m);
      NclHead head = parse_ncl_head();
      expect(Tok::At, "after non-classical connective");
      std::vector<Expr> args;
      args.push_back(parse_primary(Mode::Ho));
      return make_ncl(head, std::move(args));
    }
    if (at(Tok::Bang) || at(Tok::Question)) return parse_quantified(m);
    if (at(Tok::Caret) && m == Mode::Ho) return parse_lambda();
    if (accept(Tok::Tilde)) return Expr::neg(parse_unit(m));
    if (at(Tok::UpperWord)) return Expr::var(advance().text);
    if (at(Tok::DollarWord)) {
      Token t = advance();
      if (t.text == "$true") return Expr::truth(true);
      if (t.text == "$false") return Expr::truth(false);
      fail(t, "defined symbol '" + t.text + "' is not supported in formulas");
    }
    if (at(Tok::Number)) fail(cur(), "numeric terms are not supported");
    if (at(Tok::LowerWord) || at(Tok::Quoted)) {
      std::string name = unquote(advance().text);
      if (accept(Tok::LParen)) {
        std::vector<Expr> args;
        args.push_back(parse_term_or_formula(m));
        while (accept(Tok::Comma)) args.push_back(parse_term_or_formula(m));
        expect(Tok::RParen, "after argument list");
        // thf application is curried; functional-style argument lists are
        // accepted but normalized on the spot.
        if (m == Mode::Ho) return Expr::apply(Expr::constant(std::move(name)), args);
        return Expr::app(std::move(name), std::move(args));
      }
      return Expr::constant(std::move(name));
    }
    fail(cur(), std::string("unexpected ") + token_kind_name(cur().kind) +
                    (cur().text.empty() ? "" : " '" + cur().text + "'"));
  }

  // Argument positions accept plain terms; boolean arguments (TXF-style) are
  // permitted, so fall back to the formula grammar inside parentheses.
  Expr parse_term_or_formula(Mode m) {
    if (at(Tok::UpperWord) && peek().kind != Tok::LParen) {
      // plain variable argument, by far the common case
      return Expr::var(advance().text);
    }
    if ((at(Tok::LowerWord) || at(Tok::Quoted)) &&
        (peek().kind == Tok::Comma || peek().kind == Tok::RParen)) {
      return Expr::constant(unquote(advance().text));
    }
    return parse_formula(m);
  }

  // ---- annotated formulas -------------------------------------------------

  std::string parse_name() {
    if (at(Tok::LowerWord) || at(Tok::Number)) return advance().text;
    if (at(Tok::Quoted)) return unquote(advance().text);
    fail(cur(), "expected a formula name");
  }

  // Captures raw text until a top-level ',' or ')': used for the optional
  // source and useful_info fields, which are preserved verbatim.
  std::string capture_raw() {
    size_t start_tok = pos;
    int depth = 0;
    while (!at(Tok::End)) {
      Tok k = cur().kind;
      if (depth == 0 && (k == Tok::Comma || k == Tok::RParen)) break;
      if (k == Tok::LParen || k == Tok::LBracket || k == Tok::LBrace) depth++;
      if (k == Tok::RParen || k == Tok::RBracket || k == Tok::RBrace) depth--;
      advance();
    }
    if (pos == start_tok) return "";
    size_t begin = toks[start_tok].offset;
    size_t end = toks[pos - 1].end;
    return std::string(text.substr(begin, end - begin));
  }

  SpecValue parse_spec_value() {
    if (accept(Tok::LBracket)) {
      SpecValue v;
      v.is_list = true;
      bool first = true;
      while (!at(Tok::RBracket)) {
        if (!first) expect(Tok::Comma, "between specification entries");
        first = false;
        SpecValue::Entry entry;
        if (at(Tok::LBrace)) {
          NclHead head = parse_ncl_head();
          entry.key = head.name;
          entry.key_index = head.index;
          expect(Tok::Identity, "after connective key");
          entry.value = std::make_shared<SpecValue>(parse_spec_value());
        } else {
          Token key = advance();
          if (key.kind != Tok::DollarWord && key.kind != Tok::LowerWord && key.kind != Tok::Quoted)
            fail(key, "expected specification key or value");
          entry.key = unquote(key.text);
          if (accept(Tok::Identity)) entry.value = std::make_shared<SpecValue>(parse_spec_value());
        }
        v.entries.push_back(std::move(entry));
      }
      expect(Tok::RBracket, "after specification list");
      return v;
    }
    Token t = advance();
    if (t.kind != Tok::DollarWord && t.kind != Tok::LowerWord && t.kind != Tok::Quoted)
      fail(t, "expected specification value");
    SpecValue v;
    v.term = unquote(t.text);
    return v;
  }

  LogicSpec parse_logic_content(const Token& where) {
    Token family = expect(Tok::DollarWord, "as logic family name");
    expect(Tok::Identity, "after logic family name");
    SpecValue value = parse_spec_value();
    try {
      return resolve_logic_spec(family.text, value);
    } catch (const ToolError& e) {
      throw LocalError{where.line, where.column, e.what()};
    }
  }

  void parse_annotated(Problem& problem, Mode default_mode) {
    Token kw = expect(Tok::LowerWord, "at start of annotated formula");
    Mode mode;
    FormKeyword keyword;
    if (kw.text == "tff") {
      mode = Mode::Fo;
      keyword = FormKeyword::Tff;
    } else if (kw.text == "thf") {
      mode = Mode::Ho;
      keyword = FormKeyword::Thf;
    } else if (kw.text == "qmf") {
      mode = Mode::Qmf;
      keyword = FormKeyword::Tff;
    } else {
      fail(kw, "unknown formula keyword '" + kw.text + "'");
    }
    bool qmf_wanted = options.dialect == SourceDialect::QmltpLegacy;
    if (qmf_wanted && mode != Mode::Qmf)
      fail(kw, "input is not in QMLTP qmf syntax");
    if (!qmf_wanted && mode == Mode::Qmf)
      fail(kw, "QMLTP qmf input must be converted first (use convert-qmltp)");
    if (options.dialect == SourceDialect::Nxf && keyword != FormKeyword::Tff)
      fail(kw, "expected tff formulas (NXF dialect)");
    if ((options.dialect == SourceDialect::Nhf || options.dialect == SourceDialect::Thf) &&
        keyword != FormKeyword::Thf)
      fail(kw, "expected thf formulas");

    expect(Tok::LParen, "after formula keyword");
    AnnotatedFormula af;
    af.keyword = keyword;
    af.name = parse_name();
    expect(Tok::Comma, "after formula name");
    Token role_tok = expect(Tok::LowerWord, "as formula role");
    auto role = Role::parse(role_tok.text);
    if (!role) fail(role_tok, "unknown role '" + role_tok.text + "'");
    af.role = *role;
    expect(Tok::Comma, "after formula role");

    if (af.role.base == RoleBase::TypeDecl) {
      bool parens = accept(Tok::LParen);
      Token sym = advance();
      if (sym.kind != Tok::LowerWord && sym.kind != Tok::Quoted)
        fail(sym, "expected a symbol name in type declaration");
      expect(Tok::Colon, "in type declaration");
      TypeDecl decl{unquote(sym.text), parse_type()};
      if (parens) expect(Tok::RParen, "after type declaration");
      af.content = std::move(decl);
    } else if (af.role.base == RoleBase::Logic) {
      af.content = parse_logic_content(role_tok);
    } else {
      af.content = parse_formula(mode);
    }

    if (accept(Tok::Comma)) {
      af.source = capture_raw();
      if (accept(Tok::Comma)) af.useful_info = capture_raw();
    }
    expect(Tok::RParen, "at end of annotated formula");
    expect(Tok::Dot, "after annotated formula");
    (void)default_mode;
    problem.formulas.push_back(std::move(af));
  }

  void parse_include(Problem& problem) {
    Token kw = advance();  // 'include'
    expect(Tok::LParen, "after include");
    Token file = expect(Tok::Quoted, "as include path");
    if (at(Tok::Comma))
      fail(cur(), "include with formula selection is not supported");
    expect(Tok::RParen, "after include path");
    expect(Tok::Dot, "after include directive");

    std::string rel = unquote(file.text);
    std::vector<fs::path> candidates;
    if (!options.include_root.empty()) candidates.push_back(fs::path(options.include_root) / rel);
    if (!current_dir.empty()) candidates.push_back(fs::path(current_dir) / rel);
    if (candidates.empty()) candidates.push_back(fs::path(rel));

    fs::path chosen;
    for (const auto& cand : candidates) {
      std::error_code ec;
      if (fs::exists(cand, ec)) {
        chosen = cand;
        break;
      }
    }
    if (chosen.empty())
      fail(file, "cannot resolve include '" + rel + "'");

    std::error_code ec;
    std::string canon = fs::weakly_canonical(chosen, ec).string();
    if (ec) canon = chosen.string();
    if (includes) {
      for (const auto& open : includes->stack)
        if (open == canon) fail(file, "include cycle through '" + rel + "'");
    }

    std::ifstream in(chosen);
    if (!in) fail(file, "cannot open include '" + chosen.string() + "'");
    std::stringstream buf;
    buf << in.rdbuf();
    std::string content = buf.str();
    if (content.size() > options.max_bytes)
      fail(file, "included file exceeds the input size limit");

    Parser sub(options, diags, content);
    sub.current_dir = chosen.parent_path().string();
    sub.includes = includes;
    if (includes) includes->stack.push_back(canon);
    sub.parse_units(problem);
    if (includes) includes->stack.pop_back();
    (void)kw;
  }

  void parse_units(Problem& problem) {
    while (!at(Tok::End)) {
      try {
        if (at(Tok::LowerWord) && cur().text == "include") {
          parse_include(problem);
        } else {
          parse_annotated(problem, Mode::Fo);
        }
      } catch (const LocalError& e) {
        diags.push_back({Severity::Error, e.line, e.column, e.message});
        // Recover at the next top-level '.' so later formulas still parse.
        int depth = 0;
        while (!at(Tok::End)) {
          Tok k = cur().kind;
          if (k == Tok::LParen) depth++;
          if (k == Tok::RParen) depth--;
          advance();
          if (k == Tok::Dot && depth <= 0) break;
        }
      }
    }
  }
};

void validate_problem(Problem& problem, std::vector<ParseDiagnostic>& diags) {
  std::set<std::string> names;
  int conjectures = 0, logic_specs = 0;
  for (const auto& af : problem.formulas) {
    if (!names.insert(af.name).second)
      diags.push_back({Severity::Error, 0, 0, "duplicate formula name '" + af.name + "'"});
    if (af.role.base == RoleBase::Conjecture) conjectures++;
    if (af.is_logic_spec()) logic_specs++;
    if (af.is_type_decl()) {
      const TypeDecl& d = af.type_decl();
      if (const Type* existing = problem.signature.lookup(d.symbol)) {
        if (*existing != d.type)
          diags.push_back({Severity::Error, 0, 0,
                           "conflicting type declarations for '" + d.symbol + "'"});
      } else {
        problem.signature.set(d.symbol, d.type);
      }
    }
  }
  if (conjectures > 1)
    diags.push_back({Severity::Error, 0, 0, "problem has more than one conjecture"});
  if (logic_specs > 1)
    diags.push_back({Severity::Error, 0, 0, "problem has more than one logic specification"});

  try {
    problem = infer_signature(problem);
  } catch (const ToolError& e) {
    diags.push_back({Severity::Error, 0, 0, e.what()});
  }
}

ParseResult parse_text(std::string_view text, const ParseOptions& options,
                       const std::string& current_dir) {
  ParseResult result;
  if (text.size() > options.max_bytes) {
    result.diagnostics.push_back(
        {Severity::Error, 0, 0,
         "input exceeds the size limit of " + std::to_string(options.max_bytes) + " bytes"});
    return result;
  }
  IncludeContext includes;
  Parser parser(options, result.diagnostics, text);
  parser.current_dir = current_dir;
  parser.includes = &includes;
  Problem problem;
  parser.parse_units(problem);
  validate_problem(problem, result.diagnostics);
  if (!result.has_errors()) result.problem = std::move(problem);
  return result;
}

}  // namespace

ParseResult parse_problem(std::string_view text, const ParseOptions& options) {
  return parse_text(text, options, "");
}

ParseResult parse_file(const std::string& path, const ParseOptions& options) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    ParseResult r;
    r.diagnostics.push_back({Severity::Error, 0, 0, "cannot open file '" + path + "'"});
    return r;
  }
  std::stringstream buf;
  buf << in.rdbuf();
  std::string content = buf.str();
  return parse_text(content, options, fs::path(path).parent_path().string());
}

LogicSpec parse_logic_annotation(std::string_view text) {
  std::vector<ParseDiagnostic> diags;
  ParseOptions options;
  Parser parser(options, diags, text);
  try {
    Token family = parser.expect(Tok::DollarWord, "as logic family name");
    parser.expect(Tok::Identity, "after logic family name");
    SpecValue value = parser.parse_spec_value();
    return resolve_logic_spec(family.text, value);
  } catch (const LocalError& e) {
    throw ToolError(ErrorCode::MalformedProperty, e.message);
  }
}

namespace {

std::string fresh_formula_name(const std::string& base, std::set<std::string>& taken) {
  std::string name = base;
  for (int i = 1; taken.count(name); i++) name = base + std::to_string(i);
  taken.insert(name);
  return name;
}

}  // namespace

ParseResult convert_qmltp(std::string_view text, const ParseOptions& options) {
  ParseOptions opts = options;
  opts.dialect = SourceDialect::QmltpLegacy;
  ParseResult parsed = parse_text(text, opts, "");
  if (!parsed.ok()) return parsed;

  Problem& p = *parsed.problem;
  bool uses_equality = false;
  for (auto& af : p.formulas) {
    if (af.role.base == RoleBase::Axiom && !af.role.subrole)
      af.role.subrole = Locality::Local;
    if (af.is_formula()) {
      // Equality is kept as interpreted equality; flag it for the user.
      std::function<void(const Expr&)> scan = [&](const Expr& f) {
        if (f.kind() == ExprKind::Eq) uses_equality = true;
        switch (f.kind()) {
          case ExprKind::App:
          case ExprKind::NclApp:
            for (const Expr& a : f.args()) scan(a);
            break;
          case ExprKind::Eq:
          case ExprKind::Binary:
          case ExprKind::Apply:
            scan(f.args()[0]);
            scan(f.args()[1]);
            break;
          case ExprKind::Not:
          case ExprKind::Quant:
          case ExprKind::Modal:
          case ExprKind::Lambda:
            scan(f.body());
            break;
          default:
            break;
        }
      };
      scan(af.formula());
    }
  }
  if (uses_equality)
    parsed.diagnostics.push_back(
        {Severity::Warning, 0, 0,
         "problem uses '=' without an axiomatization; it is kept as interpreted equality"});

  // Materialize the inferred signature as tff type declarations so the NXF
  // output is self-contained.
  std::set<std::string> taken;
  for (const auto& af : p.formulas) taken.insert(af.name);
  std::vector<AnnotatedFormula> decls;
  for (const auto& [sym, type] : p.signature.entries()) {
    AnnotatedFormula af;
    af.keyword = FormKeyword::Tff;
    af.name = fresh_formula_name(sym + "_decl", taken);
    af.role = Role{RoleBase::TypeDecl, std::nullopt};
    af.content = TypeDecl{sym, type};
    decls.push_back(std::move(af));
  }
  p.formulas.insert(p.formulas.begin(), decls.begin(), decls.end());
  return parsed;
}

ParseResult convert_qmltp_file(const std::string& path, const ParseOptions& options) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    ParseResult r;
    r.diagnostics.push_back({Severity::Error, 0, 0, "cannot open file '" + path + "'"});
    return r;
  }
  std::stringstream buf;
  buf << in.rdbuf();
  std::string content = buf.str();
  return convert_qmltp(content, options);
}

}  // namespace modalkit
