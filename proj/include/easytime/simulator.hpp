#pragma once

// Deterministic event streams for the double-triathlon course and variants.

#include <cstdint>
#include <string>
#include <vector>

#include "easytime/database.hpp"
#include "easytime/runtime.hpp"

namespace easytime {

/// One discipline segment: how often each competitor crosses `mpId` and the
/// time between consecutive crossings.
struct Leg {
  std::int64_t mpId = 0;
  std::int64_t crossings = 0;
  std::int64_t minSeconds = 1;
  std::int64_t maxSeconds = 1;
};

struct Scenario {
  std::int64_t competitors = 1;
  /// Legs in course order.
  std::vector<Leg> course;
  std::int64_t startTime = 0;
  std::uint64_t seed = 0;

  /// Swim 20 laps at mp1, transition at mp2, bike 105 laps at mp3, run 55 laps at mp4.
  static Scenario double_triathlon(std::int64_t competitors = 1, std::uint64_t seed = 42);

  /// Throws std::invalid_argument when counts are < 1 or a time range is empty
  /// or non-positive.
  void validate() const;
  std::int64_t events_per_competitor() const;
};

/// Competitors are numbered 1..N. Each competitor's times increase strictly;
/// the merged stream is ordered by time, ties broken by generation order.
/// receivedSeq holds the 1-based position in the stream.
std::vector<TimingEvent> simulate(const Scenario& s);

/// `TAG<id>`, the synthetic RFID used by auto-mode output.
std::string synthetic_rfid(std::int64_t id);

/// Registry matching a simulated field: ids 1..N, synthetic tags.
std::vector<Runner> synthetic_runners(std::int64_t competitors);

/// Event file text: a `#` header naming the seed, then one line per event.
/// Auto mode writes quadruples with synthetic tags.
std::string render_event_file(const Scenario& s, const std::vector<TimingEvent>& events, EventMode mode);

/// Manual triplet or auto quadruple for a simulated event.
std::string simulated_line(const TimingEvent& e, EventMode mode);

}  // namespace easytime
