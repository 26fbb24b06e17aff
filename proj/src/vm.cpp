#include "easytime/vm.hpp"

#include <iterator>

namespace easytime {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

StackValue pop(Config& c, const char* instr) {
  if (c.stack.empty()) throw VmError(VmError::Kind::TypeFault, std::string(instr) + ": stack underflow");
  StackValue v = std::move(c.stack.back());
  c.stack.pop_back();
  return v;
}

std::int64_t pop_int(Config& c, const char* instr) {
  const StackValue v = pop(c, instr);
  if (const auto* z = std::get_if<std::int64_t>(&v)) return *z;
  throw VmError(VmError::Kind::TypeFault, std::string(instr) + ": expected an integer on the stack");
}

bool pop_bool(Config& c, const char* instr) {
  const StackValue v = pop(c, instr);
  if (const auto* t = std::get_if<bool>(&v)) return *t;
  throw VmError(VmError::Kind::TypeFault, std::string(instr) + ": expected a truth value on the stack");
}

ResultsDatabase::Row& current_row(Config& c) {
  if (!c.db) throw VmError(VmError::Kind::Malformed, "configuration has no database");
  auto* row = c.db->find_row(c.competitor);
  if (!row) throw VmError(VmError::Kind::UnknownCompetitor, "no competitor with Id=" + std::to_string(c.competitor));
  return *row;
}

std::size_t column(const Config& c, const std::string& var) {
  const auto col = c.db->column_index(var);
  if (!col) throw VmError(VmError::Kind::UnknownVariable, "no column " + var);
  return *col;
}

}  // namespace

std::string to_string(const StackValue& v) {
  if (const auto* z = std::get_if<std::int64_t>(&v)) return std::to_string(*z);
  return std::get<bool>(v) ? "true" : "false";
}

std::string_view to_string(VmError::Kind kind) {
  switch (kind) {
    case VmError::Kind::TypeFault: return "TypeFault";
    case VmError::Kind::UnknownVariable: return "UnknownVariable";
    case VmError::Kind::UnknownCompetitor: return "UnknownCompetitor";
    case VmError::Kind::Malformed: return "Malformed";
  }
  return "?";
}

void step_in_place(Config& c, const EventContext& ctx) {
  if (c.code.empty()) throw VmError(VmError::Kind::Malformed, "step on empty code");
  Instr head = std::move(c.code.front());
  c.code.erase(c.code.begin());

  std::visit(overloaded{
                 [&](const op::Push& p) { c.stack.push_back(int_val(p.value)); },
                 [&](const op::True&) { c.stack.push_back(bool_val(true)); },
                 [&](const op::False&) { c.stack.push_back(bool_val(false)); },
                 [&](const op::Eq&) {
                   const auto z1 = pop_int(c, "EQ");
                   const auto z2 = pop_int(c, "EQ");
                   c.stack.push_back(bool_val(z1 == z2));
                 },
                 [&](const op::Neq&) {
                   const auto z1 = pop_int(c, "NEQ");
                   const auto z2 = pop_int(c, "NEQ");
                   c.stack.push_back(bool_val(z1 != z2));
                 },
                 [&](const op::Dec&) { c.stack.push_back(int_val(pop_int(c, "DEC") - 1)); },
                 [&](const op::Wait&) { c.competitor = ctx.competitorId; },
                 [&](const op::Fetch& f) {
                   auto& row = current_row(c);
                   c.stack.push_back(int_val(row.cells[column(c, f.var)]));
                 },
                 [&](const op::FetchSrc& f) {
                   if (ctx.delivery && *ctx.delivery != f.source && ctx.onWarning)
                     ctx.onWarning("FETCH " + to_string(f.source) + " served by " + to_string(*ctx.delivery));
                   c.stack.push_back(int_val(ctx.eventTime));
                 },
                 [&](const op::Store& s) {
                   auto& row = current_row(c);
                   const auto col = column(c, s.var);
                   row.cells[col] = pop_int(c, "STORE");
                 },
                 [&](const op::Noop&) {},
                 [&](op::Branch& b) {
                   const bool t = pop_bool(c, "BRANCH");
                   InstrSeq& arm = t ? b.thenCode : b.elseCode;
                   c.code.insert(c.code.begin(), std::make_move_iterator(arm.begin()),
                                 std::make_move_iterator(arm.end()));
                 },
             },
             head.op);
}

Config step(Config config, const EventContext& ctx) {
  step_in_place(config, ctx);
  return config;
}

std::size_t run_in_place(const InstrSeq& code, ResultsDatabase& db, const EventContext& ctx) {
  if (code.empty() || !std::holds_alternative<op::Wait>(code.front().op))
    throw VmError(VmError::Kind::Malformed, "code block must start with WAIT");
  auto* target = db.find_row(ctx.competitorId);
  if (!target)
    throw VmError(VmError::Kind::UnknownCompetitor, "no competitor with Id=" + std::to_string(ctx.competitorId));

  ResultsDatabase scratch(db.variables());
  scratch.insert_row(target->id, target->cells);

  Config config{code, {}, &scratch, 0};
  const std::size_t limit = flattened_size(code);
  std::size_t steps = 0;
  while (!config.code.empty()) {
    if (++steps > limit) throw VmError(VmError::Kind::Malformed, "step budget exceeded");
    step_in_place(config, ctx);
  }
  target->cells = scratch.rows().front().cells;
  return steps;
}

ResultsDatabase run(const InstrSeq& code, ResultsDatabase db, const EventContext& ctx) {
  run_in_place(code, db, ctx);
  return db;
}

}  // namespace easytime
