#pragma once

// Static checks and code generation for EasyTime programs.
//
// Code generation follows the compositional translation functions:
//   agents    left fold over agent declarations
//   state     left fold over variable declarations
//   CM        (WAIT i : CS[[S]](ag, agent), mpId)
//   CS        dec x      -> FETCH x DEC STORE x
//             upd x      -> FETCH accessfile(f) | connect(ip), STORE x
//             x := a     -> CA[[a]] STORE x
//             (b) -> S   -> CB[[b]] BRANCH(CS[[S]], NOOP)
//             S1; S2     -> CS[[S1]] CS[[S2]]
//   CB        a1 == a2   -> CA[[a2]] CA[[a1]] EQ   (right operand first)
//   CA        n -> PUSH n,  x -> FETCH x

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "easytime/ast.hpp"
#include "easytime/diagnostics.hpp"
#include "easytime/instr.hpp"

namespace easytime {

struct AgentEntry {
  AgentKind kind = AgentKind::Manual;
  std::string source;

  bool operator==(const AgentEntry&) const = default;
};

using AgentTable = std::map<std::int64_t, AgentEntry>;

/// Declared variables and their initial values, in declaration order.
class InitialState {
 public:
  InitialState() = default;

  /// Returns false if `name` is already bound.
  bool bind(std::string name, std::int64_t value);
  std::optional<std::int64_t> find(std::string_view name) const;
  bool contains(std::string_view name) const { return find(name).has_value(); }
  std::size_t size() const { return bindings_.size(); }
  bool empty() const { return bindings_.empty(); }
  const std::vector<std::pair<std::string, std::int64_t>>& bindings() const { return bindings_; }
  std::vector<std::string> names() const;

  bool operator==(const InitialState&) const = default;

 private:
  std::vector<std::pair<std::string, std::int64_t>> bindings_;
};

template <typename T>
struct Checked {
  std::optional<T> value;
  std::vector<Diagnostic> diagnostics;

  bool ok() const { return value.has_value(); }
};

Checked<AgentTable> build_agents(std::span<const AgentDecl> decls);
Checked<InitialState> build_state(std::span<const VarDecl> decls);

/// Declared-before-use, agent references, and measuring-place uniqueness.
std::vector<Diagnostic> check(const Program& program, const AgentTable& agents, const InitialState& state);

struct CodegenOptions {
  /// Compile `(true) -> S` as plain S. This reproduces the published
  /// translation of the triathlon program; turn it off to get the literal
  /// TRUE BRANCH(S, NOOP) form.
  bool foldTrueGuards = true;
};

EventSource source_of(const AgentEntry& agent);

InstrSeq compile_aexpr(const AExpr& a);
InstrSeq compile_bexpr(const BExpr& b);
/// Precondition: `agent` is in `agents` (guaranteed after check()).
InstrSeq compile_stmt(const Stmt& s, const AgentTable& agents, std::int64_t agent, const CodegenOptions& opts = {});
MpCode compile_mp(const MeasuringPlace& m, const AgentTable& agents, const CodegenOptions& opts = {});

struct CompileResult {
  std::optional<CompiledUnit> unit;
  InitialState state;
  AgentTable agents;
  std::map<std::int64_t, std::int64_t> agentOfMp;
  std::vector<Diagnostic> diagnostics;

  bool ok() const { return unit.has_value(); }
  /// "ERROR" when any check failed, otherwise the newline-framed code text.
  std::string program_code() const;
};

CompileResult compile(const Program& program, const CodegenOptions& opts = {});

/// parse() followed by compile(); syntax diagnostics land in the same list.
CompileResult compile_source(std::string_view source, const CodegenOptions& opts = {});

}  // namespace easytime
