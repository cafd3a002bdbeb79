// modalkit :: TPTP-style lexer (internal to the parser)

#ifndef MODALKIT_LEXER_HPP_
#define MODALKIT_LEXER_HPP_

#include <string>
#include <string_view>
#include <vector>

#include "modalkit/diagnostics.hpp"

namespace modalkit::detail {

enum class Tok {
  LowerWord,
  UpperWord,
  DollarWord,   // $i, $o, $true, $modal_system_S5, $$system
  HashWord,     // #a, #box, #dia
  Quoted,       // 'single quoted'
  Number,
  LParen, RParen, LBracket, RBracket, LBrace, RBrace,
  Comma, Dot, Colon,
  Tilde, Amp, Vline,
  Arrow,        // =>
  RevArrow,     // <=
  Iff,          // <=>
  NotIff,       // <~>
  Eq,           // =
  Neq,          // !=
  Identity,     // ==
  Assign,       // :=
  Bang,         // !
  Question,     // ?
  Caret,        // ^
  At,           // @
  Gt,           // >
  End,          // end of input
};

struct Token {
  Tok kind = Tok::End;
  std::string text;
  int line = 1;
  int column = 1;
  size_t offset = 0;  // byte offset of first character
  size_t end = 0;     // one past last character
};

// Tokenizes the whole input. Comments and whitespace are skipped. Invalid
// characters produce error diagnostics and are dropped.
std::vector<Token> lex(std::string_view text, std::vector<ParseDiagnostic>& diags);

const char* token_kind_name(Tok kind);

}  // namespace modalkit::detail

#endif  // MODALKIT_LEXER_HPP_
