#pragma once

// The agent: turns timing events into VM runs against the results database.

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "easytime/database.hpp"
#include "easytime/instr.hpp"
#include "easytime/store.hpp"

namespace easytime {

/// Manual events are `<#>;<MP>;<TIME>`, automatic ones `<#>;<RFID>;<MP>;<TIME>`.
enum class EventMode { Manual, Auto };

struct StartNumber {
  std::int64_t value = 0;
  bool operator==(const StartNumber&) const = default;
};
struct RfidTag {
  std::string value;
  bool operator==(const RfidTag&) const = default;
};

struct TimingEvent {
  std::variant<StartNumber, RfidTag> competitor;
  /// Starting number sent alongside an RFID tag; informational, the tag wins.
  std::optional<std::int64_t> claimedNumber;
  std::int64_t mpId = 0;
  std::int64_t time = 0;
  /// Assigned by the runtime on arrival.
  std::uint64_t receivedSeq = 0;

  bool operator==(const TimingEvent&) const = default;
};

class MalformedEvent : public std::runtime_error {
 public:
  MalformedEvent(std::string line, const std::string& reason)
      : std::runtime_error("malformed event '" + line + "': " + reason), line_(std::move(line)), reason_(reason) {}
  const std::string& line() const { return line_; }
  const std::string& reason() const { return reason_; }

 private:
  std::string line_;
  std::string reason_;
};

TimingEvent parse_event_line(std::string_view line, EventMode mode);
std::string format_event_line(const TimingEvent& e, EventMode mode);
std::string to_string(const TimingEvent& e);

struct Outcome {
  bool applied = false;
  std::string reason;
  /// Arrival sequence number, filled in when the outcome is logged.
  std::uint64_t seq = 0;

  static Outcome ok() { return {true, {}, 0}; }
  static Outcome skipped(std::string why) { return {false, std::move(why), 0}; }
  std::string describe() const { return applied ? "applied" : "skipped(" + reason + ")"; }
};

struct EventLogEntry {
  std::uint64_t seq = 0;
  /// Raw input line, or the formatted event for structured sources.
  std::string input;
  std::optional<TimingEvent> event;
  Outcome outcome;
};

class AgentRuntime {
 public:
  using LogSink = std::function<void(const std::string&)>;

  AgentRuntime(CompiledUnit unit, ResultsDatabase db, RunnerRegistry registry);

  /// Resolves the competitor, runs the measuring place's code, and records the
  /// outcome. Never throws for bad events; they become skipped outcomes.
  Outcome dispatch(TimingEvent e, const std::optional<EventSource>& delivery = std::nullopt);
  /// Parses then dispatches; a malformed line is logged as skipped.
  Outcome dispatch_line(std::string_view line, EventMode mode,
                        const std::optional<EventSource>& delivery = std::nullopt);

  const CompiledUnit& unit() const { return unit_; }
  const ResultsDatabase& database() const { return db_; }
  const RunnerRegistry& registry() const { return registry_; }
  const std::vector<EventLogEntry>& event_log() const { return log_; }
  std::uint64_t received() const { return log_.size(); }

  /// Structured `<seq> <outcome> <event>` lines and warnings; stderr by default.
  void set_log_sink(LogSink sink) { sink_ = std::move(sink); }

 private:
  Outcome apply(TimingEvent e, const std::optional<EventSource>& delivery, std::string input);
  Outcome record(std::string input, std::optional<TimingEvent> event, Outcome outcome);
  void warn(const std::string& message);

  CompiledUnit unit_;
  ResultsDatabase db_;
  RunnerRegistry registry_;
  std::vector<EventLogEntry> log_;
  LogSink sink_;
  std::set<std::string> warned_;
};

/// Reads pgm.txt, runners.csv and results.csv once.
AgentRuntime load_runtime(const DataDir& dir);

struct BatchSummary {
  std::size_t applied = 0;
  std::size_t skipped = 0;
  std::filesystem::path archivedTo;
};

/// Applies a manual-mode event file line by line, then moves it to
/// `archiveDir/<name>.<unix-time>`. Blank lines and `#` comments are ignored.
/// Throws StoreError(Io) before applying anything if the file cannot be read.
BatchSummary process_batch(AgentRuntime& rt, const std::filesystem::path& file,
                           const std::filesystem::path& archiveDir);

}  // namespace easytime
