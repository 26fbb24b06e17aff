#pragma once

// Abstract syntax of EasyTime programs.
//
//   P ::= A D M
//   A ::= n manual file | n auto ip | A1;A2
//   D ::= var x := n | D1;D2
//   M ::= mp[n1] -> agnt[n2] S | M1;M2
//   S ::= dec x | upd x | x := a | (b) -> S | S1;S2
//   b ::= true | false | a1 == a2 | a1 != a2
//   a ::= n | x

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "easytime/box.hpp"
#include "easytime/diagnostics.hpp"

namespace easytime {

enum class AgentKind { Manual, Auto };

std::string_view to_string(AgentKind kind);

struct AgentDecl {
  std::int64_t number = 0;
  AgentKind kind = AgentKind::Manual;
  /// File path (manual) or dotted-quad IPv4 address (auto), without quotes.
  std::string source;
  SourceSpan span;
};

struct VarDecl {
  std::string name;
  std::int64_t init = 0;
  SourceSpan span;
};

struct NumExpr {
  std::int64_t value = 0;
};

struct VarExpr {
  std::string name;
  SourceSpan span;
};

using AExpr = std::variant<NumExpr, VarExpr>;

struct TrueLit {};
struct FalseLit {};
struct EqExpr {
  AExpr lhs;
  AExpr rhs;
};
struct NeqExpr {
  AExpr lhs;
  AExpr rhs;
};

struct BExpr {
  std::variant<TrueLit, FalseLit, EqExpr, NeqExpr> node;
  SourceSpan span;
};

struct Stmt;

struct DecLap {
  std::string var;
};
struct Update {
  std::string var;
};
struct Assign {
  std::string var;
  AExpr expr;
};
struct Guarded {
  BExpr cond;
  Box<Stmt> body;
};
/// Right-associated as parsed: `s1; s2; s3` is Seq(s1, Seq(s2, s3)).
struct Seq {
  Box<Stmt> first;
  Box<Stmt> rest;
};

struct Stmt {
  std::variant<DecLap, Update, Assign, Guarded, Seq> node;
  SourceSpan span;
};

struct MeasuringPlace {
  std::int64_t mpId = 0;
  std::int64_t agentId = 0;
  Stmt body;
  SourceSpan span;
};

struct Program {
  std::vector<AgentDecl> agents;
  std::vector<VarDecl> decls;
  std::vector<MeasuringPlace> places;
};

// Structural equality; spans are ignored.
bool structurally_equal(const AExpr& a, const AExpr& b);
bool structurally_equal(const BExpr& a, const BExpr& b);
bool structurally_equal(const Stmt& a, const Stmt& b);
bool structurally_equal(const MeasuringPlace& a, const MeasuringPlace& b);
bool structurally_equal(const Program& a, const Program& b);

/// Flattens a right-associated Seq chain into its statements.
std::vector<const Stmt*> statements(const Stmt& s);

/// Builds a right-associated Seq from a non-empty list.
Stmt sequence(std::vector<Stmt> stmts);

/// Nesting depth: leaves are 1, Guarded/Seq add one level.
int depth(const Stmt& s);

// Terse builders, mostly for tests and generators.
namespace build {
AExpr num(std::int64_t v);
AExpr var(std::string name);
BExpr yes();
BExpr no();
BExpr eq(AExpr lhs, AExpr rhs);
BExpr neq(AExpr lhs, AExpr rhs);
Stmt dec(std::string var);
Stmt upd(std::string var);
Stmt assign(std::string var, AExpr e);
Stmt guarded(BExpr cond, Stmt body);
Stmt seq(Stmt first, Stmt rest);
}  // namespace build

}  // namespace easytime
