#include "easytime/printer.hpp"

#include <sstream>

namespace easytime {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

// A single grammar STMT (no Seq), without the trailing ';'.
std::string simple_stmt(const Stmt& s) {
  return std::visit(overloaded{
                        [](const DecLap& d) { return "dec " + d.var; },
                        [](const Update& u) { return "upd " + u.var; },
                        [](const Assign& a) { return a.var + " := " + print_aexpr(a.expr); },
                        [](const Guarded& g) -> std::string {
                          if (std::holds_alternative<Seq>(g.body->node))
                            throw std::invalid_argument("pretty_print: guarded body must be a single statement");
                          return "(" + print_bexpr(g.cond) + ") -> " + simple_stmt(*g.body);
                        },
                        [](const Seq&) -> std::string {
                          throw std::invalid_argument("pretty_print: left-nested statement sequence");
                        },
                    },
                    s.node);
}

void stmt_lines(const Stmt& s, std::vector<std::string>& out) {
  const Stmt* cur = &s;
  while (const auto* seq = std::get_if<Seq>(&cur->node)) {
    out.push_back(simple_stmt(*seq->first) + ";");
    cur = &*seq->rest;
  }
  out.push_back(simple_stmt(*cur) + ";");
}

}  // namespace

std::string print_aexpr(const AExpr& a) {
  if (const auto* n = std::get_if<NumExpr>(&a)) return std::to_string(n->value);
  return std::get<VarExpr>(a).name;
}

std::string print_bexpr(const BExpr& b) {
  return std::visit(overloaded{
                        [](const TrueLit&) -> std::string { return "true"; },
                        [](const FalseLit&) -> std::string { return "false"; },
                        [](const EqExpr& e) { return print_aexpr(e.lhs) + " == " + print_aexpr(e.rhs); },
                        [](const NeqExpr& e) { return print_aexpr(e.lhs) + " != " + print_aexpr(e.rhs); },
                    },
                    b.node);
}

std::string print_stmt(const Stmt& s) {
  std::vector<std::string> lines;
  stmt_lines(s, lines);
  std::string out;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (i) out += '\n';
    out += lines[i];
  }
  return out;
}

std::string pretty_print(const Program& program) {
  std::vector<std::string> sections;

  if (!program.agents.empty()) {
    std::ostringstream s;
    for (std::size_t i = 0; i < program.agents.size(); ++i) {
      const auto& a = program.agents[i];
      if (i) s << '\n';
      s << a.number << ' ' << to_string(a.kind) << ' ';
      if (a.kind == AgentKind::Manual)
        s << '"' << a.source << '"';
      else
        s << a.source;
      s << ';';
    }
    sections.push_back(s.str());
  }

  if (!program.decls.empty()) {
    std::ostringstream s;
    for (std::size_t i = 0; i < program.decls.size(); ++i) {
      if (i) s << '\n';
      s << "var " << program.decls[i].name << " := " << program.decls[i].init << ';';
    }
    sections.push_back(s.str());
  }

  if (!program.places.empty()) {
    std::ostringstream s;
    for (std::size_t i = 0; i < program.places.size(); ++i) {
      const auto& mp = program.places[i];
      if (i) s << '\n';
      s << "mp[" << mp.mpId << "] -> agnt[" << mp.agentId << "] {\n";
      std::vector<std::string> lines;
      stmt_lines(mp.body, lines);
      for (const auto& line : lines) s << "  " << line << '\n';
      s << '}';
    }
    sections.push_back(s.str());
  }

  std::string out;
  for (std::size_t i = 0; i < sections.size(); ++i) {
    if (i) out += "\n\n";
    out += sections[i];
  }
  return out;
}

}  // namespace easytime
