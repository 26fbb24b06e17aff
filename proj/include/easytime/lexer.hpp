#pragma once

#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "easytime/diagnostics.hpp"

namespace easytime {

enum class TokenKind {
  KwVar,
  KwMp,
  KwAgnt,
  KwDec,
  KwUpd,
  KwAuto,
  KwManual,
  KwTrue,
  KwFalse,
  Semicolon,    // ;
  ColonAssign,  // :=
  Arrow,        // ->
  EqEq,         // ==
  NotEq,        // !=
  LParen,
  RParen,
  LBrace,
  RBrace,
  LBracket,
  RBracket,
  Int,    // #Int
  Ident,  // #Id
  Ip,     // #ip, dotted quad
  File,   // #file, double-quoted; lexeme keeps the quotes
  End,
};

std::string_view to_string(TokenKind kind);

struct Token {
  TokenKind kind = TokenKind::End;
  std::string lexeme;
  int line = 1;
  int column = 1;

  SourceSpan span() const;
};

class LexError : public std::runtime_error {
 public:
  LexError(int line, int column, std::string offending, const std::string& what);

  int line() const { return line_; }
  int column() const { return column_; }
  const std::string& offending() const { return offending_; }

 private:
  int line_;
  int column_;
  std::string offending_;
};

/// Splits EasyTime source into tokens. `//` comments run to end of line.
/// Throws LexError on the first character outside the language's alphabet.
/// No End token is appended.
std::vector<Token> tokenize(std::string_view source);

/// Error-tolerant variant used by the parser: bad characters become L001
/// diagnostics and are skipped. Always ends with an End token.
std::vector<Token> tokenize_recovering(std::string_view source, std::vector<Diagnostic>& diagnostics);

bool is_keyword(std::string_view word);

}  // namespace easytime
