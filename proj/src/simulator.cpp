#include "easytime/simulator.hpp"

#include <algorithm>
#include <limits>
#include <random>
#include <stdexcept>

namespace easytime {

namespace {

std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

// Uniform integer in [lo, hi] by rejection; independent of the standard
// library's distribution implementation.
std::int64_t uniform(std::mt19937_64& gen, std::int64_t lo, std::int64_t hi) {
  const auto span = static_cast<std::uint64_t>(hi - lo) + 1;
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() - std::numeric_limits<std::uint64_t>::max() % span;
  std::uint64_t x;
  do {
    x = gen();
  } while (x >= limit);
  return lo + static_cast<std::int64_t>(x % span);
}

}  // namespace

Scenario Scenario::double_triathlon(std::int64_t competitors, std::uint64_t seed) {
  Scenario s;
  s.competitors = competitors;
  s.seed = seed;
  s.startTime = 1246435200;  // 2009-07-01T08:00:00Z
  s.course = {
      {1, 20, 300, 540},   // 380 m swim lap
      {2, 1, 180, 900},    // first transition
      {3, 105, 330, 600},  // 3.4 km bike lap
      {4, 55, 420, 840},   // 1.5 km run lap
  };
  return s;
}

void Scenario::validate() const {
  if (competitors < 1) throw std::invalid_argument("scenario needs at least one competitor");
  if (course.empty()) throw std::invalid_argument("scenario course is empty");
  for (const auto& leg : course) {
    if (leg.mpId < 1) throw std::invalid_argument("measuring place ids start at 1");
    if (leg.crossings < 1) throw std::invalid_argument("each leg needs at least one crossing");
    if (leg.minSeconds < 1 || leg.minSeconds > leg.maxSeconds)
      throw std::invalid_argument("leg time range must satisfy 1 <= min <= max");
  }
  if (startTime < 0) throw std::invalid_argument("start time must be >= 0");
}

std::int64_t Scenario::events_per_competitor() const {
  std::int64_t n = 0;
  for (const auto& leg : course) n += leg.crossings;
  return n;
}

std::vector<TimingEvent> simulate(const Scenario& s) {
  s.validate();
  std::vector<TimingEvent> events;
  events.reserve(static_cast<std::size_t>(s.competitors * s.events_per_competitor()));

  std::uint64_t seeder = s.seed;
  for (std::int64_t id = 1; id <= s.competitors; ++id) {
    std::mt19937_64 gen(splitmix64(seeder));
    std::int64_t t = s.startTime;
    for (const auto& leg : s.course) {
      for (std::int64_t k = 0; k < leg.crossings; ++k) {
        t += uniform(gen, leg.minSeconds, leg.maxSeconds);
        TimingEvent e;
        e.competitor = StartNumber{id};
        e.mpId = leg.mpId;
        e.time = t;
        e.receivedSeq = events.size();  // generation order, the tiebreak
        events.push_back(std::move(e));
      }
    }
  }

  std::stable_sort(events.begin(), events.end(), [](const TimingEvent& a, const TimingEvent& b) {
    return a.time != b.time ? a.time < b.time : a.receivedSeq < b.receivedSeq;
  });
  for (std::size_t i = 0; i < events.size(); ++i) events[i].receivedSeq = i + 1;
  return events;
}

std::string synthetic_rfid(std::int64_t id) { return "TAG" + std::to_string(id); }

std::vector<Runner> synthetic_runners(std::int64_t competitors) {
  std::vector<Runner> out;
  for (std::int64_t id = 1; id <= competitors; ++id)
    out.push_back(Runner{id, synthetic_rfid(id), "Competitor" + std::to_string(id), "Sim"});
  return out;
}

std::string simulated_line(const TimingEvent& e, EventMode mode) {
  const auto id = std::get<StartNumber>(e.competitor).value;
  if (mode == EventMode::Manual) return format_event_line(e, mode);
  TimingEvent quad = e;
  quad.competitor = RfidTag{synthetic_rfid(id)};
  quad.claimedNumber = id;
  return format_event_line(quad, mode);
}

std::string render_event_file(const Scenario& s, const std::vector<TimingEvent>& events, EventMode mode) {
  std::string out = "# easytime-sim seed=" + std::to_string(s.seed) + " competitors=" + std::to_string(s.competitors) +
                    " mode=" + (mode == EventMode::Manual ? "manual" : "auto") + "\n";
  for (const auto& e : events) {
    out += simulated_line(e, mode);
    out += '\n';
  }
  return out;
}

}  // namespace easytime
