#include "easytime/ast.hpp"

#include <algorithm>
#include <stdexcept>

namespace easytime {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

}  // namespace

std::string_view to_string(AgentKind kind) { return kind == AgentKind::Manual ? "manual" : "auto"; }

bool structurally_equal(const AExpr& a, const AExpr& b) {
  if (a.index() != b.index()) return false;
  if (const auto* n = std::get_if<NumExpr>(&a)) return n->value == std::get<NumExpr>(b).value;
  return std::get<VarExpr>(a).name == std::get<VarExpr>(b).name;
}

bool structurally_equal(const BExpr& a, const BExpr& b) {
  if (a.node.index() != b.node.index()) return false;
  return std::visit(overloaded{
                        [](const TrueLit&) { return true; },
                        [](const FalseLit&) { return true; },
                        [&](const EqExpr& x) {
                          const auto& y = std::get<EqExpr>(b.node);
                          return structurally_equal(x.lhs, y.lhs) && structurally_equal(x.rhs, y.rhs);
                        },
                        [&](const NeqExpr& x) {
                          const auto& y = std::get<NeqExpr>(b.node);
                          return structurally_equal(x.lhs, y.lhs) && structurally_equal(x.rhs, y.rhs);
                        },
                    },
                    a.node);
}

bool structurally_equal(const Stmt& a, const Stmt& b) {
  if (a.node.index() != b.node.index()) return false;
  return std::visit(overloaded{
                        [&](const DecLap& x) { return x.var == std::get<DecLap>(b.node).var; },
                        [&](const Update& x) { return x.var == std::get<Update>(b.node).var; },
                        [&](const Assign& x) {
                          const auto& y = std::get<Assign>(b.node);
                          return x.var == y.var && structurally_equal(x.expr, y.expr);
                        },
                        [&](const Guarded& x) {
                          const auto& y = std::get<Guarded>(b.node);
                          return structurally_equal(x.cond, y.cond) && structurally_equal(*x.body, *y.body);
                        },
                        [&](const Seq& x) {
                          const auto& y = std::get<Seq>(b.node);
                          return structurally_equal(*x.first, *y.first) && structurally_equal(*x.rest, *y.rest);
                        },
                    },
                    a.node);
}

bool structurally_equal(const MeasuringPlace& a, const MeasuringPlace& b) {
  return a.mpId == b.mpId && a.agentId == b.agentId && structurally_equal(a.body, b.body);
}

bool structurally_equal(const Program& a, const Program& b) {
  auto sameAgent = [](const AgentDecl& x, const AgentDecl& y) {
    return x.number == y.number && x.kind == y.kind && x.source == y.source;
  };
  auto sameDecl = [](const VarDecl& x, const VarDecl& y) { return x.name == y.name && x.init == y.init; };
  auto samePlace = [](const MeasuringPlace& x, const MeasuringPlace& y) { return structurally_equal(x, y); };
  return std::equal(a.agents.begin(), a.agents.end(), b.agents.begin(), b.agents.end(), sameAgent) &&
         std::equal(a.decls.begin(), a.decls.end(), b.decls.begin(), b.decls.end(), sameDecl) &&
         std::equal(a.places.begin(), a.places.end(), b.places.begin(), b.places.end(), samePlace);
}

std::vector<const Stmt*> statements(const Stmt& s) {
  std::vector<const Stmt*> out;
  const Stmt* cur = &s;
  while (const auto* seq = std::get_if<Seq>(&cur->node)) {
    auto nested = statements(*seq->first);
    out.insert(out.end(), nested.begin(), nested.end());
    cur = &*seq->rest;
  }
  out.push_back(cur);
  return out;
}

Stmt sequence(std::vector<Stmt> stmts) {
  if (stmts.empty()) throw std::invalid_argument("sequence: empty statement list");
  Stmt acc = std::move(stmts.back());
  for (auto it = stmts.rbegin() + 1; it != stmts.rend(); ++it) {
    SourceSpan span{it->span.line, it->span.column, acc.span.endLine, acc.span.endColumn};
    acc = Stmt{Seq{std::move(*it), std::move(acc)}, span};
  }
  return acc;
}

int depth(const Stmt& s) {
  return std::visit(overloaded{
                        [](const Guarded& g) { return 1 + depth(*g.body); },
                        [](const Seq& q) { return 1 + std::max(depth(*q.first), depth(*q.rest)); },
                        [](const auto&) { return 1; },
                    },
                    s.node);
}

namespace build {
AExpr num(std::int64_t v) { return NumExpr{v}; }
AExpr var(std::string name) { return VarExpr{std::move(name), {}}; }
BExpr yes() { return BExpr{TrueLit{}, {}}; }
BExpr no() { return BExpr{FalseLit{}, {}}; }
BExpr eq(AExpr lhs, AExpr rhs) { return BExpr{EqExpr{std::move(lhs), std::move(rhs)}, {}}; }
BExpr neq(AExpr lhs, AExpr rhs) { return BExpr{NeqExpr{std::move(lhs), std::move(rhs)}, {}}; }
Stmt dec(std::string var) { return Stmt{DecLap{std::move(var)}, {}}; }
Stmt upd(std::string var) { return Stmt{Update{std::move(var)}, {}}; }
Stmt assign(std::string var, AExpr e) { return Stmt{Assign{std::move(var), std::move(e)}, {}}; }
Stmt guarded(BExpr cond, Stmt body) { return Stmt{Guarded{std::move(cond), std::move(body)}, {}}; }
Stmt seq(Stmt first, Stmt rest) { return Stmt{Seq{std::move(first), std::move(rest)}, {}}; }
}  // namespace build

}  // namespace easytime
