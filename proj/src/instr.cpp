#include "easytime/instr.hpp"

#include <algorithm>

namespace easytime {

std::string to_string(const EventSource& src) {
  if (src.kind == SourceKind::AccessFile) return "accessfile(\"" + src.operand + "\")";
  return "connect(" + src.operand + ")";
}

bool op::Branch::operator==(const Branch& other) const {
  return thenCode == other.thenCode && elseCode == other.elseCode;
}

std::size_t flattened_size(const InstrSeq& code) {
  std::size_t n = 0;
  for (const auto& i : code) {
    ++n;
    if (const auto* b = std::get_if<op::Branch>(&i.op)) n += flattened_size(b->thenCode) + flattened_size(b->elseCode);
  }
  return n;
}

const MpCode* CompiledUnit::find(std::int64_t mpId) const {
  auto it = std::find_if(units.begin(), units.end(), [&](const MpCode& u) { return u.mpId == mpId; });
  return it == units.end() ? nullptr : &*it;
}

namespace code {
Instr push(std::int64_t v) { return Instr{op::Push{v}}; }
Instr truth() { return Instr{op::True{}}; }
Instr falsity() { return Instr{op::False{}}; }
Instr eq() { return Instr{op::Eq{}}; }
Instr neq() { return Instr{op::Neq{}}; }
Instr dec() { return Instr{op::Dec{}}; }
Instr wait() { return Instr{op::Wait{}}; }
Instr fetch(std::string var) { return Instr{op::Fetch{std::move(var)}}; }
Instr fetch_src(EventSource src) { return Instr{op::FetchSrc{std::move(src)}}; }
Instr accessfile(std::string path) { return fetch_src(EventSource{SourceKind::AccessFile, std::move(path)}); }
Instr connect(std::string ip) { return fetch_src(EventSource{SourceKind::Connect, std::move(ip)}); }
Instr store(std::string var) { return Instr{op::Store{std::move(var)}}; }
Instr noop() { return Instr{op::Noop{}}; }
Instr branch(InstrSeq thenCode, InstrSeq elseCode) {
  return Instr{op::Branch{std::move(thenCode), std::move(elseCode)}};
}
}  // namespace code

}  // namespace easytime
