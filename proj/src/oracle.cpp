#include "easytime/oracle.hpp"

namespace easytime {

namespace {

std::int64_t& cell(OracleRow& row, const std::string& name) {
  auto it = row.find(name);
  if (it == row.end()) throw MissingVariable(name);
  return it->second;
}

}  // namespace

std::int64_t oracle_eval(const AExpr& a, const OracleRow& row) {
  if (const auto* n = std::get_if<NumExpr>(&a)) return n->value;
  const auto& name = std::get<VarExpr>(a).name;
  auto it = row.find(name);
  if (it == row.end()) throw MissingVariable(name);
  return it->second;
}

bool oracle_eval(const BExpr& b, const OracleRow& row) {
  if (std::holds_alternative<TrueLit>(b.node)) return true;
  if (std::holds_alternative<FalseLit>(b.node)) return false;
  if (const auto* e = std::get_if<EqExpr>(&b.node)) return oracle_eval(e->lhs, row) == oracle_eval(e->rhs, row);
  const auto& n = std::get<NeqExpr>(b.node);
  return oracle_eval(n.lhs, row) != oracle_eval(n.rhs, row);
}

OracleRow oracle_exec(const Stmt& stmt, const AgentTable& agents, std::int64_t agent, OracleRow row,
                      std::int64_t eventTime) {
  if (const auto* d = std::get_if<DecLap>(&stmt.node)) {
    cell(row, d->var) -= 1;
  } else if (const auto* u = std::get_if<Update>(&stmt.node)) {
    cell(row, u->var) = eventTime;
  } else if (const auto* a = std::get_if<Assign>(&stmt.node)) {
    const auto value = oracle_eval(a->expr, row);
    cell(row, a->var) = value;
  } else if (const auto* g = std::get_if<Guarded>(&stmt.node)) {
    if (oracle_eval(g->cond, row)) row = oracle_exec(*g->body, agents, agent, std::move(row), eventTime);
  } else {
    const auto& q = std::get<Seq>(stmt.node);
    row = oracle_exec(*q.first, agents, agent, std::move(row), eventTime);
    row = oracle_exec(*q.rest, agents, agent, std::move(row), eventTime);
  }
  return row;
}

}  // namespace easytime
