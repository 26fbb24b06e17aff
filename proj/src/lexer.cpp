#include "easytime/lexer.hpp"

#include <array>
#include <charconv>
#include <optional>
#include <utility>

namespace easytime {

namespace {

constexpr std::array<std::pair<std::string_view, TokenKind>, 9> kKeywords{{
    {"var", TokenKind::KwVar},
    {"mp", TokenKind::KwMp},
    {"agnt", TokenKind::KwAgnt},
    {"dec", TokenKind::KwDec},
    {"upd", TokenKind::KwUpd},
    {"auto", TokenKind::KwAuto},
    {"manual", TokenKind::KwManual},
    {"true", TokenKind::KwTrue},
    {"false", TokenKind::KwFalse},
}};

bool is_alpha(char c) { return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z'); }
bool is_digit(char c) { return c >= '0' && c <= '9'; }
bool is_ident_char(char c) { return is_alpha(c) || is_digit(c) || c == '_'; }

// Length of the UTF-8 sequence starting with lead byte c (1 for invalid bytes).
std::size_t utf8_length(unsigned char c) {
  if (c < 0x80) return 1;
  if ((c >> 5) == 0x6) return 2;
  if ((c >> 4) == 0xE) return 3;
  if ((c >> 3) == 0x1E) return 4;
  return 1;
}

std::string printable(std::string_view s) {
  if (s.size() == 1) {
    const auto c = static_cast<unsigned char>(s[0]);
    if (c == '\n') return "\\n";
    if (c < 0x20 || c == 0x7F) {
      static constexpr char kHex[] = "0123456789abcdef";
      return std::string("\\x") + kHex[c >> 4] + kHex[c & 0xF];
    }
  }
  return std::string(s);
}

class Lexer {
 public:
  Lexer(std::string_view src, std::vector<Diagnostic>* sink) : src_(src), sink_(sink) {}

  std::vector<Token> run() {
    std::vector<Token> out;
    while (true) {
      skip_trivia();
      if (pos_ >= src_.size()) break;
      if (auto tok = next()) out.push_back(std::move(*tok));
    }
    return out;
  }

 private:
  char peek(std::size_t ahead = 0) const {
    return pos_ + ahead < src_.size() ? src_[pos_ + ahead] : '\0';
  }

  void advance(std::size_t n = 1) {
    for (std::size_t i = 0; i < n && pos_ < src_.size(); ++i) {
      if (src_[pos_] == '\n') {
        ++line_;
        col_ = 1;
      } else {
        ++col_;
      }
      ++pos_;
    }
  }

  void skip_trivia() {
    while (pos_ < src_.size()) {
      const char c = src_[pos_];
      if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
        advance();
      } else if (c == '/' && peek(1) == '/') {
        while (pos_ < src_.size() && src_[pos_] != '\n') advance();
      } else {
        break;
      }
    }
  }

  // Reports and skips; returns nullopt so the caller emits nothing.
  std::optional<Token> fail(int line, int col, std::string offending, const std::string& message,
                            std::size_t skip) {
    if (!sink_) throw LexError(line, col, offending, message);
    sink_->push_back(Diagnostic{Severity::Error, std::string(diag::kLexError), message,
                                SourceSpan{line, col, line, col + 1}, {}});
    advance(skip);
    return std::nullopt;
  }

  Token make(TokenKind kind, std::size_t len) {
    Token t{kind, std::string(src_.substr(pos_, len)), line_, col_};
    advance(len);
    return t;
  }

  std::optional<Token> next() {
    const char c = src_[pos_];
    if (is_alpha(c)) {
      std::size_t len = 1;
      while (is_ident_char(peek(len))) ++len;
      const auto word = src_.substr(pos_, len);
      for (const auto& [kw, kind] : kKeywords)
        if (word == kw) return make(kind, len);
      return make(TokenKind::Ident, len);
    }
    if (is_digit(c)) return number();
    if (c == '"') return file_path();

    switch (c) {
      case ';': return make(TokenKind::Semicolon, 1);
      case '(': return make(TokenKind::LParen, 1);
      case ')': return make(TokenKind::RParen, 1);
      case '{': return make(TokenKind::LBrace, 1);
      case '}': return make(TokenKind::RBrace, 1);
      case '[': return make(TokenKind::LBracket, 1);
      case ']': return make(TokenKind::RBracket, 1);
      case ':':
        if (peek(1) == '=') return make(TokenKind::ColonAssign, 2);
        break;
      case '-':
        if (peek(1) == '>') return make(TokenKind::Arrow, 2);
        break;
      case '=':
        if (peek(1) == '=') return make(TokenKind::EqEq, 2);
        break;
      case '!':
        if (peek(1) == '=') return make(TokenKind::NotEq, 2);
        break;
      default:
        break;
    }
    const std::size_t len = std::min(utf8_length(static_cast<unsigned char>(c)), src_.size() - pos_);
    const std::string bad(src_.substr(pos_, len));
    return fail(line_, col_, bad, "unexpected character '" + printable(bad) + "'", len);
  }

  std::optional<Token> number() {
    std::size_t len = 0;
    while (is_digit(peek(len))) ++len;
    if (peek(len) == '.' && is_digit(peek(len + 1))) return ip_address(len);

    std::int64_t value = 0;
    const auto digits = src_.substr(pos_, len);
    const auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), value);
    if (ec != std::errc{} || ptr != digits.data() + digits.size())
      return fail(line_, col_, std::string(digits), "integer literal out of range: " + std::string(digits), len);
    return make(TokenKind::Int, len);
  }

  // Called with the first octet's length already scanned.
  std::optional<Token> ip_address(std::size_t firstLen) {
    std::size_t len = 0;
    std::size_t octetLen = firstLen;
    for (int octet = 0; octet < 4; ++octet) {
      if (octet > 0) {
        if (peek(len) != '.' || !is_digit(peek(len + 1))) {
          return fail(line_, col_, std::string(src_.substr(pos_, len)),
                      "IPv4 address needs four dot-separated octets", len == 0 ? 1 : len);
        }
        ++len;
        octetLen = 0;
        while (is_digit(peek(len + octetLen))) ++octetLen;
      }
      int value = 0;
      const auto digits = src_.substr(pos_ + len, octetLen);
      const auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), value);
      if (ec != std::errc{} || value > 255 || octetLen > 3) {
        len += octetLen;
        return fail(line_, col_, std::string(src_.substr(pos_, len)),
                    "IPv4 octet out of range 0-255: " + std::string(digits), len);
      }
      len += octetLen;
    }
    if (peek(len) == '.' && is_digit(peek(len + 1))) {
      std::size_t extra = len;
      while (is_digit(peek(extra)) || peek(extra) == '.') ++extra;
      return fail(line_, col_, std::string(src_.substr(pos_, extra)),
                  "IPv4 address needs exactly four octets", extra);
    }
    return make(TokenKind::Ip, len);
  }

  std::optional<Token> file_path() {
    std::size_t len = 1;
    while (pos_ + len < src_.size() && src_[pos_ + len] != '"' && src_[pos_ + len] != '\n') ++len;
    if (pos_ + len >= src_.size() || src_[pos_ + len] != '"')
      return fail(line_, col_, "\"", "unterminated quoted file path", len);
    return make(TokenKind::File, len + 1);
  }

  std::string_view src_;
  std::vector<Diagnostic>* sink_;
  std::size_t pos_ = 0;
  int line_ = 1;
  int col_ = 1;
};

}  // namespace

std::string_view to_string(TokenKind kind) {
  switch (kind) {
    case TokenKind::KwVar: return "'var'";
    case TokenKind::KwMp: return "'mp'";
    case TokenKind::KwAgnt: return "'agnt'";
    case TokenKind::KwDec: return "'dec'";
    case TokenKind::KwUpd: return "'upd'";
    case TokenKind::KwAuto: return "'auto'";
    case TokenKind::KwManual: return "'manual'";
    case TokenKind::KwTrue: return "'true'";
    case TokenKind::KwFalse: return "'false'";
    case TokenKind::Semicolon: return "';'";
    case TokenKind::ColonAssign: return "':='";
    case TokenKind::Arrow: return "'->'";
    case TokenKind::EqEq: return "'=='";
    case TokenKind::NotEq: return "'!='";
    case TokenKind::LParen: return "'('";
    case TokenKind::RParen: return "')'";
    case TokenKind::LBrace: return "'{'";
    case TokenKind::RBrace: return "'}'";
    case TokenKind::LBracket: return "'['";
    case TokenKind::RBracket: return "']'";
    case TokenKind::Int: return "integer";
    case TokenKind::Ident: return "identifier";
    case TokenKind::Ip: return "IPv4 address";
    case TokenKind::File: return "quoted file path";
    case TokenKind::End: return "end of input";
  }
  return "?";
}

SourceSpan Token::span() const {
  return SourceSpan{line, column, line, column + static_cast<int>(lexeme.size())};
}

LexError::LexError(int line, int column, std::string offending, const std::string& what)
    : std::runtime_error(std::to_string(line) + ":" + std::to_string(column) + ": " + what),
      line_(line),
      column_(column),
      offending_(std::move(offending)) {}

std::vector<Token> tokenize(std::string_view source) { return Lexer(source, nullptr).run(); }

std::vector<Token> tokenize_recovering(std::string_view source, std::vector<Diagnostic>& diagnostics) {
  auto tokens = Lexer(source, &diagnostics).run();
  int line = 1;
  int col = 1;
  for (char c : source) {
    if (c == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  tokens.push_back(Token{TokenKind::End, "", line, col});
  return tokens;
}

bool is_keyword(std::string_view word) {
  for (const auto& [kw, kind] : kKeywords)
    if (word == kw) return true;
  return false;
}

}  // namespace easytime
