#pragma once

// The EasyTime stack machine. A configuration <code, stack, db, j> advances
// one transition rule per step:
//
//   PUSH n      push n                 FETCH x         push db[j].x
//   TRUE/FALSE  push truth value       FETCH src(..)   push the event time
//   EQ/NEQ      pop z1 z2, push z1 ?= z2
//   DEC         pop z, push z-1        STORE x         pop z, db[j].x := z
//   WAIT i      j := event competitor  NOOP            nothing
//   BRANCH(c1, c2)  pop t, continue with c1 if t else c2, then the rest

#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "easytime/database.hpp"
#include "easytime/instr.hpp"

namespace easytime {

using StackValue = std::variant<std::int64_t, bool>;

inline StackValue int_val(std::int64_t v) { return StackValue{v}; }
inline StackValue bool_val(bool v) { return StackValue{v}; }

std::string to_string(const StackValue& v);

struct Config {
  InstrSeq code;
  /// Evaluation stack; the top is the back of the vector.
  std::vector<StackValue> stack;
  ResultsDatabase* db = nullptr;
  /// Competitor bound by WAIT; 0 before the first WAIT.
  std::int64_t competitor = 0;
};

struct EventContext {
  std::int64_t competitorId = 0;
  /// Seconds since 1970-01-01; this is what FETCH accessfile/connect pushes.
  std::int64_t eventTime = 0;
  /// Channel that actually delivered the event, when known. A FETCH of a
  /// different source still pushes eventTime but raises a warning.
  std::optional<EventSource> delivery;
  std::function<void(const std::string&)> onWarning;
};

class VmError : public std::runtime_error {
 public:
  enum class Kind { TypeFault, UnknownVariable, UnknownCompetitor, Malformed };

  VmError(Kind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  Kind kind() const { return kind_; }

 private:
  Kind kind_;
};

std::string_view to_string(VmError::Kind kind);

/// Applies exactly one transition. Precondition: config.code is non-empty.
void step_in_place(Config& config, const EventContext& ctx);
Config step(Config config, const EventContext& ctx);

/// Runs `code` (which must start with WAIT) for the event's competitor.
/// Stores go to a copy of the competitor's row that is written back only if
/// the whole block completes; a fault leaves `db` untouched.
/// Returns the number of steps taken.
std::size_t run_in_place(const InstrSeq& code, ResultsDatabase& db, const EventContext& ctx);
ResultsDatabase run(const InstrSeq& code, ResultsDatabase db, const EventContext& ctx);

}  // namespace easytime
