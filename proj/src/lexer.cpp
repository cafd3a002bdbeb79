#include "lexer.hpp"

#include <cctype>

namespace modalkit::detail {

namespace {

bool is_alnum_(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }
bool is_lower(char c) { return std::islower(static_cast<unsigned char>(c)); }
bool is_upper(char c) { return std::isupper(static_cast<unsigned char>(c)); }
bool is_digit(char c) { return std::isdigit(static_cast<unsigned char>(c)); }

struct Cursor {
  std::string_view text;
  size_t pos = 0;
  int line = 1;
  int column = 1;

  bool done() const { return pos >= text.size(); }
  char peek(size_t ahead = 0) const {
    return pos + ahead < text.size() ? text[pos + ahead] : '\0';
  }
  void advance() {
    if (done()) return;
    if (text[pos] == '\n') {
      line++;
      column = 1;
    } else {
      column++;
    }
    pos++;
  }
};

}  // namespace

const char* token_kind_name(Tok kind) {
  switch (kind) {
    case Tok::LowerWord: return "identifier";
    case Tok::UpperWord: return "variable";
    case Tok::DollarWord: return "defined word";
    case Tok::HashWord: return "#-word";
    case Tok::Quoted: return "quoted atom";
    case Tok::Number: return "number";
    case Tok::LParen: return "'('";
    case Tok::RParen: return "')'";
    case Tok::LBracket: return "'['";
    case Tok::RBracket: return "']'";
    case Tok::LBrace: return "'{'";
    case Tok::RBrace: return "'}'";
    case Tok::Comma: return "','";
    case Tok::Dot: return "'.'";
    case Tok::Colon: return "':'";
    case Tok::Tilde: return "'~'";
    case Tok::Amp: return "'&'";
    case Tok::Vline: return "'|'";
    case Tok::Arrow: return "'=>'";
    case Tok::RevArrow: return "'<='";
    case Tok::Iff: return "'<=>'";
    case Tok::NotIff: return "'<~>'";
    case Tok::Eq: return "'='";
    case Tok::Neq: return "'!='";
    case Tok::Identity: return "'=='";
    case Tok::Assign: return "':='";
    case Tok::Bang: return "'!'";
    case Tok::Question: return "'?'";
    case Tok::Caret: return "'^'";
    case Tok::At: return "'@'";
    case Tok::Gt: return "'>'";
    case Tok::End: return "end of input";
  }
  return "?";
}

std::vector<Token> lex(std::string_view text, std::vector<ParseDiagnostic>& diags) {
  std::vector<Token> out;
  Cursor c{text};

  auto push = [&](Tok kind, size_t start, int line, int col) {
    Token t;
    t.kind = kind;
    t.text = std::string(text.substr(start, c.pos - start));
    t.line = line;
    t.column = col;
    t.offset = start;
    t.end = c.pos;
    out.push_back(std::move(t));
  };

  while (!c.done()) {
    char ch = c.peek();
    if (ch == ' ' || ch == '\t' || ch == '\r' || ch == '\n') {
      c.advance();
      continue;
    }
    if (ch == '%') {
      while (!c.done() && c.peek() != '\n') c.advance();
      continue;
    }
    if (ch == '/' && c.peek(1) == '*') {
      int line = c.line, col = c.column;
      c.advance();
      c.advance();
      while (!c.done() && !(c.peek() == '*' && c.peek(1) == '/')) c.advance();
      if (c.done()) {
        diags.push_back({Severity::Error, line, col, "unterminated block comment"});
      } else {
        c.advance();
        c.advance();
      }
      continue;
    }

    size_t start = c.pos;
    int line = c.line, col = c.column;

    if (ch == '\'') {
      c.advance();
      while (!c.done() && c.peek() != '\'') {
        if (c.peek() == '\\') c.advance();
        c.advance();
      }
      if (c.done()) {
        diags.push_back({Severity::Error, line, col, "unterminated quoted atom"});
        push(Tok::Quoted, start, line, col);
        continue;
      }
      c.advance();
      push(Tok::Quoted, start, line, col);
      continue;
    }

    if (ch == '$') {
      c.advance();
      if (c.peek() == '$') c.advance();
      while (is_alnum_(c.peek())) c.advance();
      push(Tok::DollarWord, start, line, col);
      continue;
    }
    if (ch == '#') {
      c.advance();
      while (is_alnum_(c.peek())) c.advance();
      push(Tok::HashWord, start, line, col);
      continue;
    }
    if (is_lower(ch)) {
      while (is_alnum_(c.peek())) c.advance();
      // hyphenated role subroles: axiom-local, hypothesis-global
      if (c.peek() == '-' && is_lower(c.peek(1))) {
        c.advance();
        while (is_alnum_(c.peek())) c.advance();
      }
      push(Tok::LowerWord, start, line, col);
      continue;
    }
    if (is_upper(ch) || ch == '_') {
      while (is_alnum_(c.peek())) c.advance();
      push(Tok::UpperWord, start, line, col);
      continue;
    }
    if (is_digit(ch) || ((ch == '+' || ch == '-') && is_digit(c.peek(1)))) {
      c.advance();
      while (is_digit(c.peek()) || c.peek() == '.' || c.peek() == '/' || c.peek() == 'e' ||
             c.peek() == 'E' || ((c.peek() == '+' || c.peek() == '-') &&
                                 (text[c.pos - 1] == 'e' || text[c.pos - 1] == 'E')))
        c.advance();
      push(Tok::Number, start, line, col);
      continue;
    }

    // Operators, longest match first.
    auto starts = [&](const char* s) {
      size_t n = 0;
      while (s[n]) {
        if (c.peek(n) != s[n]) return false;
        n++;
      }
      return true;
    };
    auto take = [&](size_t n, Tok kind) {
      for (size_t i = 0; i < n; i++) c.advance();
      push(kind, start, line, col);
    };

    if (starts("<=>")) { take(3, Tok::Iff); continue; }
    if (starts("<~>")) { take(3, Tok::NotIff); continue; }
    if (starts("=>")) { take(2, Tok::Arrow); continue; }
    if (starts("<=")) { take(2, Tok::RevArrow); continue; }
    if (starts("==")) { take(2, Tok::Identity); continue; }
    if (starts("!=")) { take(2, Tok::Neq); continue; }
    if (starts(":=")) { take(2, Tok::Assign); continue; }

    switch (ch) {
      case '(': take(1, Tok::LParen); continue;
      case ')': take(1, Tok::RParen); continue;
      case '[': take(1, Tok::LBracket); continue;
      case ']': take(1, Tok::RBracket); continue;
      case '{': take(1, Tok::LBrace); continue;
      case '}': take(1, Tok::RBrace); continue;
      case ',': take(1, Tok::Comma); continue;
      case '.': take(1, Tok::Dot); continue;
      case ':': take(1, Tok::Colon); continue;
      case '~': take(1, Tok::Tilde); continue;
      case '&': take(1, Tok::Amp); continue;
      case '|': take(1, Tok::Vline); continue;
      case '=': take(1, Tok::Eq); continue;
      case '!': take(1, Tok::Bang); continue;
      case '?': take(1, Tok::Question); continue;
      case '^': take(1, Tok::Caret); continue;
      case '@': take(1, Tok::At); continue;
      case '>': take(1, Tok::Gt); continue;
      default:
        diags.push_back({Severity::Error, line, col,
                         std::string("invalid character '") + ch + "' in input"});
        c.advance();
        continue;
    }
  }

  Token end;
  end.kind = Tok::End;
  end.line = c.line;
  end.column = c.column;
  end.offset = c.pos;
  end.end = c.pos;
  out.push_back(std::move(end));
  return out;
}

}  // namespace modalkit::detail
