#pragma once

// Instruction set of the EasyTime stack machine.

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

namespace easytime {

enum class SourceKind { AccessFile, Connect };

/// Where an agent's events come from: accessfile(path) for manual agents,
/// connect(ip) for automatic ones.
struct EventSource {
  SourceKind kind = SourceKind::AccessFile;
  std::string operand;

  bool operator==(const EventSource&) const = default;
};

std::string to_string(const EventSource& src);

struct Instr;
using InstrSeq = std::vector<Instr>;

namespace op {
struct Push {
  std::int64_t value = 0;
  bool operator==(const Push&) const = default;
};
struct True {
  bool operator==(const True&) const = default;
};
struct False {
  bool operator==(const False&) const = default;
};
struct Eq {
  bool operator==(const Eq&) const = default;
};
struct Neq {
  bool operator==(const Neq&) const = default;
};
struct Dec {
  bool operator==(const Dec&) const = default;
};
/// Binds the event's competitor as the current row (`WAIT i`).
struct Wait {
  bool operator==(const Wait&) const = default;
};
/// Pushes a database cell of the current row.
struct Fetch {
  std::string var;
  bool operator==(const Fetch&) const = default;
};
/// Pushes the event time delivered by an agent's source.
struct FetchSrc {
  EventSource source;
  bool operator==(const FetchSrc&) const = default;
};
struct Store {
  std::string var;
  bool operator==(const Store&) const = default;
};
struct Noop {
  bool operator==(const Noop&) const = default;
};
struct Branch {
  InstrSeq thenCode;
  InstrSeq elseCode;
  bool operator==(const Branch& other) const;
};
}  // namespace op

struct Instr {
  std::variant<op::Push, op::True, op::False, op::Eq, op::Neq, op::Dec, op::Wait, op::Fetch, op::FetchSrc,
               op::Store, op::Noop, op::Branch>
      op;

  bool operator==(const Instr& other) const { return op == other.op; }
};

/// Instruction count with BRANCH arms expanded; bounds the steps of one run.
std::size_t flattened_size(const InstrSeq& code);

/// Code for one measuring place, tagged with its id.
struct MpCode {
  std::int64_t mpId = 0;
  InstrSeq code;

  bool operator==(const MpCode&) const = default;
};

/// Compiled program: measuring places in source order.
struct CompiledUnit {
  std::vector<MpCode> units;

  const MpCode* find(std::int64_t mpId) const;
  bool operator==(const CompiledUnit&) const = default;
};

namespace code {
Instr push(std::int64_t v);
Instr truth();
Instr falsity();
Instr eq();
Instr neq();
Instr dec();
Instr wait();
Instr fetch(std::string var);
Instr fetch_src(EventSource src);
Instr accessfile(std::string path);
Instr connect(std::string ip);
Instr store(std::string var);
Instr noop();
Instr branch(InstrSeq thenCode, InstrSeq elseCode);
}  // namespace code

}  // namespace easytime
