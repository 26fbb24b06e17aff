#include "easytime/runtime.hpp"

#include <charconv>
#include <ctime>
#include <iostream>

#include "easytime/vm.hpp"

namespace easytime {

namespace fs = std::filesystem;

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r' || s.back() == '\n'))
    s.remove_suffix(1);
  return s;
}

std::int64_t field_int(std::string_view line, std::string_view field, const char* what, std::int64_t min) {
  field = trim(field);
  std::int64_t v = 0;
  const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
  if (field.empty() || ec != std::errc{} || ptr != field.data() + field.size())
    throw MalformedEvent(std::string(line), std::string(what) + " is not a decimal integer");
  if (v < min) throw MalformedEvent(std::string(line), std::string(what) + " must be >= " + std::to_string(min));
  return v;
}

}  // namespace

TimingEvent parse_event_line(std::string_view raw, EventMode mode) {
  const auto line = trim(raw);
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    const auto at = line.find(';', start);
    fields.push_back(line.substr(start, at == std::string_view::npos ? std::string_view::npos : at - start));
    if (at == std::string_view::npos) break;
    start = at + 1;
  }

  TimingEvent e;
  if (mode == EventMode::Manual) {
    if (fields.size() != 3) throw MalformedEvent(std::string(line), "expected <#>;<MP>;<TIME>");
    e.competitor = StartNumber{field_int(line, fields[0], "starting number", 0)};
    e.mpId = field_int(line, fields[1], "measuring place", 1);
    e.time = field_int(line, fields[2], "time", 0);
    return e;
  }

  if (fields.size() != 4) throw MalformedEvent(std::string(line), "expected <#>;<RFID>;<MP>;<TIME>");
  e.claimedNumber = field_int(line, fields[0], "starting number", 0);
  const auto tag = trim(fields[1]);
  if (tag.empty() || tag.find_first_of(" \t") != std::string_view::npos)
    throw MalformedEvent(std::string(line), "RFID tag must be a single non-empty token");
  e.competitor = RfidTag{std::string(tag)};
  e.mpId = field_int(line, fields[2], "measuring place", 1);
  e.time = field_int(line, fields[3], "time", 0);
  return e;
}

std::string format_event_line(const TimingEvent& e, EventMode mode) {
  const auto mp = std::to_string(e.mpId);
  const auto t = std::to_string(e.time);
  if (mode == EventMode::Manual) {
    const auto* n = std::get_if<StartNumber>(&e.competitor);
    const auto number = n ? n->value : e.claimedNumber.value_or(0);
    return std::to_string(number) + ";" + mp + ";" + t;
  }
  const auto* tag = std::get_if<RfidTag>(&e.competitor);
  std::int64_t number = e.claimedNumber.value_or(0);
  if (const auto* n = std::get_if<StartNumber>(&e.competitor)) number = n->value;
  return std::to_string(number) + ";" + (tag ? tag->value : std::string()) + ";" + mp + ";" + t;
}

std::string to_string(const TimingEvent& e) {
  std::string who;
  if (const auto* n = std::get_if<StartNumber>(&e.competitor))
    who = "#" + std::to_string(n->value);
  else
    who = "rfid " + std::get<RfidTag>(e.competitor).value;
  return "<" + who + ", mp" + std::to_string(e.mpId) + ", t=" + std::to_string(e.time) + ">";
}

AgentRuntime::AgentRuntime(CompiledUnit unit, ResultsDatabase db, RunnerRegistry registry)
    : unit_(std::move(unit)),
      db_(std::move(db)),
      registry_(std::move(registry)),
      sink_([](const std::string& line) { std::cerr << line << '\n'; }) {}

void AgentRuntime::warn(const std::string& message) {
  if (warned_.insert(message).second && sink_) sink_("warning: " + message);
}

Outcome AgentRuntime::record(std::string input, std::optional<TimingEvent> event, Outcome outcome) {
  const std::uint64_t seq = log_.size() + 1;
  outcome.seq = seq;
  if (event) event->receivedSeq = seq;
  if (sink_) sink_(std::to_string(seq) + " " + outcome.describe() + " " + (event ? to_string(*event) : input));
  log_.push_back(EventLogEntry{seq, std::move(input), std::move(event), outcome});
  return outcome;
}

Outcome AgentRuntime::dispatch(TimingEvent e, const std::optional<EventSource>& delivery) {
  const EventMode mode = std::holds_alternative<RfidTag>(e.competitor) ? EventMode::Auto : EventMode::Manual;
  std::string input = format_event_line(e, mode);
  return apply(std::move(e), delivery, std::move(input));
}

Outcome AgentRuntime::apply(TimingEvent e, const std::optional<EventSource>& delivery, std::string input) {

  std::int64_t id = 0;
  if (const auto* tag = std::get_if<RfidTag>(&e.competitor)) {
    const Runner* r = registry_.by_rfid(tag->value);
    if (!r) return record(input, std::move(e), Outcome::skipped("unknown RFID " + tag->value));
    id = r->id;
    if (e.claimedNumber && *e.claimedNumber != id)
      warn("RFID " + tag->value + " belongs to #" + std::to_string(id) + ", event claimed #" +
           std::to_string(*e.claimedNumber));
  } else {
    id = std::get<StartNumber>(e.competitor).value;
  }

  const MpCode* block = unit_.find(e.mpId);
  if (!block) return record(input, std::move(e), Outcome::skipped("unknown measuring place " + std::to_string(e.mpId)));
  if (!db_.find_row(id)) return record(input, std::move(e), Outcome::skipped("unknown competitor " + std::to_string(id)));

  EventContext ctx{id, e.time, delivery, [this](const std::string& w) { warn(w); }};
  try {
    run_in_place(block->code, db_, ctx);
  } catch (const VmError& err) {
    return record(input, std::move(e), Outcome::skipped(std::string(to_string(err.kind())) + ": " + err.what()));
  }
  return record(input, std::move(e), Outcome::ok());
}

Outcome AgentRuntime::dispatch_line(std::string_view line, EventMode mode, const std::optional<EventSource>& delivery) {
  TimingEvent e;
  try {
    e = parse_event_line(line, mode);
  } catch (const MalformedEvent& err) {
    return record(std::string(trim(line)), std::nullopt, Outcome::skipped("malformed: " + err.reason()));
  }
  return apply(std::move(e), delivery, std::string(trim(line)));
}

AgentRuntime load_runtime(const DataDir& dir) {
  auto unit = load_code(dir.pgm());
  auto runners = load_runners(dir.runners());
  auto db = load_results(dir.results());
  return AgentRuntime(std::move(unit), std::move(db), RunnerRegistry(std::move(runners)));
}

BatchSummary process_batch(AgentRuntime& rt, const fs::path& file, const fs::path& archiveDir) {
  const std::string text = read_file(file);

  BatchSummary summary;
  const EventSource delivery{SourceKind::AccessFile, file.filename().string()};
  std::size_t start = 0;
  while (start < text.size()) {
    auto end = text.find('\n', start);
    if (end == std::string::npos) end = text.size();
    const auto line = trim(std::string_view(text).substr(start, end - start));
    start = end + 1;
    if (line.empty() || line.front() == '#') continue;
    const auto outcome = rt.dispatch_line(line, EventMode::Manual, delivery);
    (outcome.applied ? summary.applied : summary.skipped) += 1;
  }

  std::error_code ec;
  fs::create_directories(archiveDir, ec);
  const std::string stamp = std::to_string(static_cast<long long>(std::time(nullptr)));
  fs::path target = archiveDir / (file.filename().string() + "." + stamp);
  for (int n = 1; fs::exists(target); ++n)
    target = archiveDir / (file.filename().string() + "." + stamp + "." + std::to_string(n));
  fs::rename(file, target, ec);
  if (ec) {
    // Different filesystem: copy, then delete the original.
    fs::copy_file(file, target, ec);
    if (ec) throw StoreError(StoreError::Kind::Io, "cannot archive " + file.string() + ": " + ec.message());
    fs::remove(file, ec);
  }
  summary.archivedTo = target;
  return summary;
}

}  // namespace easytime
