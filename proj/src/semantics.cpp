#include "easytime/semantics.hpp"

#include <algorithm>
#include <set>
#include <stdexcept>

#include "easytime/code_text.hpp"
#include "easytime/parser.hpp"

namespace easytime {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

Diagnostic error(std::string_view code, std::string message, SourceSpan span) {
  return Diagnostic{Severity::Error, std::string(code), std::move(message), span, {}};
}

void append(InstrSeq& dst, InstrSeq src) {
  dst.insert(dst.end(), std::make_move_iterator(src.begin()), std::make_move_iterator(src.end()));
}

class UseChecker {
 public:
  UseChecker(const InitialState& state, std::vector<Diagnostic>& out) : state_(state), out_(out) {}

  void stmt(const Stmt& s) {
    std::visit(overloaded{
                   [&](const DecLap& d) { use(d.var, s.span); },
                   [&](const Update& u) { use(u.var, s.span); },
                   [&](const Assign& a) {
                     use(a.var, s.span);
                     aexpr(a.expr, s.span);
                   },
                   [&](const Guarded& g) {
                     bexpr(g.cond);
                     stmt(*g.body);
                   },
                   [&](const Seq& q) {
                     stmt(*q.first);
                     stmt(*q.rest);
                   },
               },
               s.node);
  }

 private:
  void use(const std::string& name, SourceSpan span) {
    if (!state_.contains(name))
      out_.push_back(error(diag::kUndeclaredVariable, "undeclared variable '" + name + "'", span));
  }

  void aexpr(const AExpr& a, SourceSpan fallback) {
    if (const auto* v = std::get_if<VarExpr>(&a)) use(v->name, v->span.line ? v->span : fallback);
  }

  void bexpr(const BExpr& b) {
    std::visit(overloaded{
                   [&](const EqExpr& e) {
                     aexpr(e.lhs, b.span);
                     aexpr(e.rhs, b.span);
                   },
                   [&](const NeqExpr& e) {
                     aexpr(e.lhs, b.span);
                     aexpr(e.rhs, b.span);
                   },
                   [](const auto&) {},
               },
               b.node);
  }

  const InitialState& state_;
  std::vector<Diagnostic>& out_;
};

}  // namespace

bool InitialState::bind(std::string name, std::int64_t value) {
  if (contains(name)) return false;
  bindings_.emplace_back(std::move(name), value);
  return true;
}

std::optional<std::int64_t> InitialState::find(std::string_view name) const {
  for (const auto& [n, v] : bindings_)
    if (n == name) return v;
  return std::nullopt;
}

std::vector<std::string> InitialState::names() const {
  std::vector<std::string> out;
  out.reserve(bindings_.size());
  for (const auto& b : bindings_) out.push_back(b.first);
  return out;
}

namespace {

// First declaration wins; later duplicates are reported.
AgentTable fold_agents(std::span<const AgentDecl> decls, std::vector<Diagnostic>& out) {
  AgentTable table;
  for (const auto& d : decls) {
    if (table.count(d.number)) {
      out.push_back(error(diag::kDuplicateAgent, "duplicate agent number " + std::to_string(d.number), d.span));
      continue;
    }
    table[d.number] = AgentEntry{d.kind, d.source};
  }
  return table;
}

InitialState fold_state(std::span<const VarDecl> decls, std::vector<Diagnostic>& out) {
  InitialState state;
  for (const auto& d : decls) {
    if (!state.bind(d.name, d.init))
      out.push_back(error(diag::kDuplicateVariable, "multiple declarations of variable '" + d.name + "'", d.span));
  }
  return state;
}

}  // namespace

Checked<AgentTable> build_agents(std::span<const AgentDecl> decls) {
  Checked<AgentTable> result;
  auto table = fold_agents(decls, result.diagnostics);
  if (result.diagnostics.empty()) result.value = std::move(table);
  return result;
}

Checked<InitialState> build_state(std::span<const VarDecl> decls) {
  Checked<InitialState> result;
  auto state = fold_state(decls, result.diagnostics);
  if (result.diagnostics.empty()) result.value = std::move(state);
  return result;
}

std::vector<Diagnostic> check(const Program& program, const AgentTable& agents, const InitialState& state) {
  std::vector<Diagnostic> out;
  std::set<std::int64_t> seen;
  UseChecker uses(state, out);
  for (const auto& mp : program.places) {
    if (!seen.insert(mp.mpId).second)
      out.push_back(error(diag::kDuplicateMeasuringPlace, "duplicate measuring place mp[" + std::to_string(mp.mpId) + "]",
                          mp.span));
    if (!agents.count(mp.agentId))
      out.push_back(error(diag::kUnknownAgent,
                          "mp[" + std::to_string(mp.mpId) + "] refers to unknown agent " + std::to_string(mp.agentId),
                          mp.span));
    uses.stmt(mp.body);
  }
  return out;
}

EventSource source_of(const AgentEntry& agent) {
  return EventSource{agent.kind == AgentKind::Manual ? SourceKind::AccessFile : SourceKind::Connect, agent.source};
}

InstrSeq compile_aexpr(const AExpr& a) {
  if (const auto* n = std::get_if<NumExpr>(&a)) return {code::push(n->value)};
  return {code::fetch(std::get<VarExpr>(a).name)};
}

InstrSeq compile_bexpr(const BExpr& b) {
  return std::visit(overloaded{
                        [](const TrueLit&) { return InstrSeq{code::truth()}; },
                        [](const FalseLit&) { return InstrSeq{code::falsity()}; },
                        [](const EqExpr& e) {
                          InstrSeq out = compile_aexpr(e.rhs);
                          append(out, compile_aexpr(e.lhs));
                          out.push_back(code::eq());
                          return out;
                        },
                        [](const NeqExpr& e) {
                          InstrSeq out = compile_aexpr(e.rhs);
                          append(out, compile_aexpr(e.lhs));
                          out.push_back(code::neq());
                          return out;
                        },
                    },
                    b.node);
}

InstrSeq compile_stmt(const Stmt& s, const AgentTable& agents, std::int64_t agent, const CodegenOptions& opts) {
  return std::visit(
      overloaded{
          [](const DecLap& d) { return InstrSeq{code::fetch(d.var), code::dec(), code::store(d.var)}; },
          [&](const Update& u) {
            auto it = agents.find(agent);
            if (it == agents.end())
              throw std::logic_error("compile_stmt: unknown agent " + std::to_string(agent));
            return InstrSeq{code::fetch_src(source_of(it->second)), code::store(u.var)};
          },
          [](const Assign& a) {
            InstrSeq out = compile_aexpr(a.expr);
            out.push_back(code::store(a.var));
            return out;
          },
          [&](const Guarded& g) {
            InstrSeq body = compile_stmt(*g.body, agents, agent, opts);
            if (opts.foldTrueGuards && std::holds_alternative<TrueLit>(g.cond.node)) return body;
            InstrSeq out = compile_bexpr(g.cond);
            out.push_back(code::branch(std::move(body), {code::noop()}));
            return out;
          },
          [&](const Seq& q) {
            InstrSeq out = compile_stmt(*q.first, agents, agent, opts);
            append(out, compile_stmt(*q.rest, agents, agent, opts));
            return out;
          },
      },
      s.node);
}

MpCode compile_mp(const MeasuringPlace& m, const AgentTable& agents, const CodegenOptions& opts) {
  InstrSeq code{code::wait()};
  append(code, compile_stmt(m.body, agents, m.agentId, opts));
  return MpCode{m.mpId, std::move(code)};
}

std::string CompileResult::program_code() const {
  if (!unit) return "ERROR";
  return "\n" + serialize_code(*unit) + "\n";
}

CompileResult compile(const Program& program, const CodegenOptions& opts) {
  CompileResult result;
  result.agents = fold_agents(program.agents, result.diagnostics);
  result.state = fold_state(program.decls, result.diagnostics);
  auto checks = check(program, result.agents, result.state);
  result.diagnostics.insert(result.diagnostics.end(), checks.begin(), checks.end());
  if (has_errors(result.diagnostics)) return result;

  CompiledUnit unit;
  for (const auto& mp : program.places) {
    unit.units.push_back(compile_mp(mp, result.agents, opts));
    result.agentOfMp[mp.mpId] = mp.agentId;
  }
  result.unit = std::move(unit);
  return result;
}

CompileResult compile_source(std::string_view source, const CodegenOptions& opts) {
  auto parsed = parse(source);
  if (!parsed.program) {
    CompileResult result;
    result.diagnostics = std::move(parsed.diagnostics);
    return result;
  }
  return compile(*parsed.program, opts);
}

}  // namespace easytime
