#include "easytime/parser.hpp"

#include <charconv>
#include <initializer_list>

#include "easytime/lexer.hpp"

namespace easytime {

namespace {

// Thrown after a syntax diagnostic has been recorded; caught at a recovery point.
struct SyntaxAbort {};

SourceSpan join(const SourceSpan& a, const SourceSpan& b) { return {a.line, a.column, b.endLine, b.endColumn}; }

class Parser {
 public:
  Parser(std::vector<Token> tokens, std::vector<Diagnostic>& diags) : toks_(std::move(tokens)), diags_(diags) {}

  std::optional<Program> program() {
    Program p;
    while (at(TokenKind::Int)) {
      try {
        p.agents.push_back(agent());
      } catch (const SyntaxAbort&) {
        sync_statement();
      }
    }
    while (at(TokenKind::KwVar)) {
      try {
        p.decls.push_back(declaration());
      } catch (const SyntaxAbort&) {
        sync_statement();
      }
    }
    bool sawPlace = false;
    while (!at(TokenKind::End)) {
      try {
        if (!at(TokenKind::KwMp)) error({TokenKind::KwMp});
        sawPlace = true;
        if (auto mp = place()) p.places.push_back(std::move(*mp));
      } catch (const SyntaxAbort&) {
        sync_place();
      }
    }
    if (!sawPlace) {
      // MES_PLACES ::= MES_PLACE MES_PLACES | MES_PLACE
      record(peek(), {TokenKind::KwMp});
    }
    if (!diags_.empty()) return std::nullopt;
    return p;
  }

 private:
  const Token& peek() const { return toks_[pos_]; }
  bool at(TokenKind k) const { return peek().kind == k; }

  const Token& advance() {
    const Token& t = toks_[pos_];
    if (t.kind != TokenKind::End) ++pos_;
    return t;
  }

  const Token& previous() const { return toks_[pos_ == 0 ? 0 : pos_ - 1]; }

  void record(const Token& found, std::initializer_list<TokenKind> expected) {
    Diagnostic d;
    d.code = std::string(diag::kSyntaxError);
    d.span = found.span();
    std::string list;
    for (auto k : expected) {
      d.expected.emplace_back(to_string(k));
      if (!list.empty()) list += ", ";
      list += to_string(k);
    }
    d.message = "expected " + list + " but found " +
                (found.kind == TokenKind::End ? std::string("end of input") : "'" + found.lexeme + "'");
    diags_.push_back(std::move(d));
  }

  [[noreturn]] void error(std::initializer_list<TokenKind> expected) {
    record(peek(), expected);
    throw SyntaxAbort{};
  }

  const Token& expect(TokenKind k) {
    if (!at(k)) error({k});
    return advance();
  }

  std::int64_t integer(const Token& t) const {
    std::int64_t v = 0;
    std::from_chars(t.lexeme.data(), t.lexeme.data() + t.lexeme.size(), v);
    return v;
  }

  std::int64_t positive(const Token& t, const char* what) {
    const auto v = integer(t);
    if (v < 1) {
      diags_.push_back(Diagnostic{Severity::Error, std::string(diag::kBadNumber),
                                  std::string(what) + " must be >= 1", t.span(), {}});
    }
    return v;
  }

  // Skip to just past the next ';', or up to (not past) a '}'.
  void sync_statement() {
    while (!at(TokenKind::End)) {
      if (at(TokenKind::Semicolon)) {
        advance();
        return;
      }
      if (at(TokenKind::RBrace)) return;
      advance();
    }
  }

  // Skip past the closing '}' of the current measuring place.
  void sync_place() {
    while (!at(TokenKind::End)) {
      if (at(TokenKind::RBrace)) {
        advance();
        return;
      }
      if (at(TokenKind::KwMp) && pos_ > 0) return;
      advance();
    }
  }

  AgentDecl agent() {
    const Token& num = expect(TokenKind::Int);
    AgentDecl a;
    a.number = positive(num, "agent number");
    if (at(TokenKind::KwAuto)) {
      advance();
      a.kind = AgentKind::Auto;
      a.source = expect(TokenKind::Ip).lexeme;
    } else if (at(TokenKind::KwManual)) {
      advance();
      a.kind = AgentKind::Manual;
      const std::string& quoted = expect(TokenKind::File).lexeme;
      a.source = quoted.substr(1, quoted.size() - 2);
    } else {
      error({TokenKind::KwAuto, TokenKind::KwManual});
    }
    const Token& semi = expect(TokenKind::Semicolon);
    a.span = join(num.span(), semi.span());
    return a;
  }

  VarDecl declaration() {
    const Token& kw = expect(TokenKind::KwVar);
    VarDecl d;
    d.name = expect(TokenKind::Ident).lexeme;
    expect(TokenKind::ColonAssign);
    d.init = integer(expect(TokenKind::Int));
    d.span = join(kw.span(), expect(TokenKind::Semicolon).span());
    return d;
  }

  std::optional<MeasuringPlace> place() {
    const Token& kw = expect(TokenKind::KwMp);
    MeasuringPlace mp;
    expect(TokenKind::LBracket);
    mp.mpId = positive(expect(TokenKind::Int), "measuring place id");
    expect(TokenKind::RBracket);
    expect(TokenKind::Arrow);
    expect(TokenKind::KwAgnt);
    expect(TokenKind::LBracket);
    mp.agentId = positive(expect(TokenKind::Int), "agent number");
    expect(TokenKind::RBracket);
    expect(TokenKind::LBrace);

    std::vector<Stmt> body;
    bool failed = false;
    while (!at(TokenKind::RBrace) && !at(TokenKind::End)) {
      try {
        body.push_back(statement());
      } catch (const SyntaxAbort&) {
        failed = true;
        sync_statement();
      }
    }
    if (body.empty() && !failed) {
      // STMTS ::= STMT STMTS | STMT
      record(peek(), {TokenKind::KwDec, TokenKind::KwUpd, TokenKind::Ident, TokenKind::LParen});
      failed = true;
    }
    const Token& close = expect(TokenKind::RBrace);
    if (failed) return std::nullopt;
    mp.body = sequence(std::move(body));
    mp.span = join(kw.span(), close.span());
    return mp;
  }

  Stmt statement() {
    const Token& first = peek();
    switch (first.kind) {
      case TokenKind::KwDec: {
        advance();
        DecLap s{expect(TokenKind::Ident).lexeme};
        return Stmt{std::move(s), join(first.span(), expect(TokenKind::Semicolon).span())};
      }
      case TokenKind::KwUpd: {
        advance();
        Update s{expect(TokenKind::Ident).lexeme};
        return Stmt{std::move(s), join(first.span(), expect(TokenKind::Semicolon).span())};
      }
      case TokenKind::Ident: {
        advance();
        expect(TokenKind::ColonAssign);
        Assign s{first.lexeme, expression()};
        return Stmt{std::move(s), join(first.span(), expect(TokenKind::Semicolon).span())};
      }
      case TokenKind::LParen: {
        advance();
        BExpr cond = condition();
        expect(TokenKind::RParen);
        expect(TokenKind::Arrow);
        Stmt body = statement();
        const SourceSpan span = join(first.span(), body.span);
        return Stmt{Guarded{std::move(cond), std::move(body)}, span};
      }
      default:
        error({TokenKind::KwDec, TokenKind::KwUpd, TokenKind::Ident, TokenKind::LParen});
    }
  }

  BExpr condition() {
    const Token& first = peek();
    if (at(TokenKind::KwTrue)) return BExpr{TrueLit{}, advance().span()};
    if (at(TokenKind::KwFalse)) return BExpr{FalseLit{}, advance().span()};
    if (!at(TokenKind::Int) && !at(TokenKind::Ident))
      error({TokenKind::KwTrue, TokenKind::KwFalse, TokenKind::Int, TokenKind::Ident});
    AExpr lhs = expression();
    if (at(TokenKind::EqEq)) {
      advance();
      AExpr rhs = expression();
      return BExpr{EqExpr{std::move(lhs), std::move(rhs)}, join(first.span(), previous().span())};
    }
    if (at(TokenKind::NotEq)) {
      advance();
      AExpr rhs = expression();
      return BExpr{NeqExpr{std::move(lhs), std::move(rhs)}, join(first.span(), previous().span())};
    }
    error({TokenKind::EqEq, TokenKind::NotEq});
  }

  AExpr expression() {
    if (at(TokenKind::Int)) return NumExpr{integer(advance())};
    if (at(TokenKind::Ident)) {
      const Token& t = advance();
      return VarExpr{t.lexeme, t.span()};
    }
    error({TokenKind::Int, TokenKind::Ident});
  }

  std::vector<Token> toks_;
  std::size_t pos_ = 0;
  std::vector<Diagnostic>& diags_;
};

}  // namespace

ParseResult parse(std::string_view source) {
  ParseResult result;
  auto tokens = tokenize_recovering(source, result.diagnostics);
  Parser parser(std::move(tokens), result.diagnostics);
  result.program = parser.program();
  return result;
}

}  // namespace easytime
