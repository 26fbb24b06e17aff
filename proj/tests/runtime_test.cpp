#include <gtest/gtest.h>

#include <chrono>
#include <fstream>
#include <thread>

#include <httplib.h>
#include <json.hpp>

#include "easytime/runtime.hpp"
#include "easytime/service.hpp"
#include "easytime/simulator.hpp"
#include "support/temp_dir.hpp"
#include "support/triathlon.hpp"

using namespace easytime;
using testgen::TempDir;
using testgen::triathlon_runtime;
using json = nlohmann::json;

namespace {

std::vector<Runner> runners() { return {{7, "TAG7", "Novak", "Ana"}, {8, "TAG42", "Kranjc", "Luka"}}; }

}  // namespace

TEST(EventLine, Manual) {
  const auto e = parse_event_line("7;1;3600", EventMode::Manual);
  EXPECT_EQ(e.competitor, (std::variant<StartNumber, RfidTag>{StartNumber{7}}));
  EXPECT_EQ(e.mpId, 1);
  EXPECT_EQ(e.time, 3600);
  EXPECT_FALSE(e.claimedNumber);
}

TEST(EventLine, Auto) {
  const auto e = parse_event_line("7;TAG42;3;5000", EventMode::Auto);
  EXPECT_EQ(e.competitor, (std::variant<StartNumber, RfidTag>{RfidTag{"TAG42"}}));
  EXPECT_EQ(e.claimedNumber, 7);
  EXPECT_EQ(e.mpId, 3);
  EXPECT_EQ(e.time, 5000);
}

TEST(EventLine, Malformed) {
  for (const char* bad : {"x;y", "", "7;1", "7;1;3600;4", "7;0;10", "7;1;-5", "a;1;2", "7;1;99999999999999999999"})
    EXPECT_THROW(parse_event_line(bad, EventMode::Manual), MalformedEvent) << bad;
  for (const char* bad : {"7;1;3600", "7;;3;5000", "7;T;0;1", "7;T;3;x"})
    EXPECT_THROW(parse_event_line(bad, EventMode::Auto), MalformedEvent) << bad;
}

TEST(EventLine, FormatRoundTrip) {
  for (const char* line : {"7;1;3600", "12;4;1246435200"}) {
    EXPECT_EQ(format_event_line(parse_event_line(line, EventMode::Manual), EventMode::Manual), line);
  }
  EXPECT_EQ(format_event_line(parse_event_line("7;TAG42;3;5000", EventMode::Auto), EventMode::Auto),
            "7;TAG42;3;5000");
}

TEST(Dispatch, AppliesBlock) {
  auto rt = triathlon_runtime(runners());
  const auto o = rt.dispatch(parse_event_line("7;1;3600", EventMode::Manual));
  EXPECT_TRUE(o.applied);
  EXPECT_EQ(rt.database().get(7, "SWIM"), 3600);
  EXPECT_EQ(rt.database().get(7, "ROUND1"), 19);
  EXPECT_EQ(rt.database().get(8, "ROUND1"), 20);
}

TEST(Dispatch, SkipsUnknowns) {
  auto rt = triathlon_runtime(runners());
  const auto before = rt.database();
  EXPECT_EQ(rt.dispatch_line("7;99;10", EventMode::Manual).reason, "unknown measuring place 99");
  EXPECT_EQ(rt.dispatch_line("7;UNKNOWN;1;10", EventMode::Auto).reason, "unknown RFID UNKNOWN");
  EXPECT_EQ(rt.dispatch_line("5;1;10", EventMode::Manual).reason, "unknown competitor 5");
  EXPECT_NE(rt.dispatch_line("x;y", EventMode::Manual).reason.find("malformed"), std::string::npos);
  EXPECT_EQ(rt.database(), before);
  EXPECT_EQ(rt.received(), 4u);
}

TEST(Dispatch, RfidIsAuthoritative) {
  auto rt = triathlon_runtime(runners());
  std::vector<std::string> log;
  rt.set_log_sink([&](const std::string& s) { log.push_back(s); });
  EXPECT_TRUE(rt.dispatch_line("7;TAG42;3;5000", EventMode::Auto).applied);
  EXPECT_EQ(rt.database().get(8, "INTER2"), 5000);
  EXPECT_EQ(rt.database().get(7, "INTER2"), 0);
  bool warned = false;
  for (const auto& l : log) warned |= l.rfind("warning:", 0) == 0 && l.find("TAG42") != std::string::npos;
  EXPECT_TRUE(warned);
}

TEST(Dispatch, DuplicatesApplyAgain) {
  auto rt = triathlon_runtime(runners());
  rt.dispatch_line("7;1;100", EventMode::Manual);
  rt.dispatch_line("7;1;100", EventMode::Manual);
  EXPECT_EQ(rt.database().get(7, "ROUND1"), 18);
}

TEST(Dispatch, LogLinesAndSequence) {
  auto rt = triathlon_runtime(runners());
  std::vector<std::string> log;
  rt.set_log_sink([&](const std::string& s) { log.push_back(s); });
  rt.dispatch_line("7;1;100", EventMode::Manual);
  rt.dispatch_line("7;99;100", EventMode::Manual);
  ASSERT_EQ(rt.event_log().size(), 2u);
  EXPECT_EQ(rt.event_log()[0].seq, 1u);
  EXPECT_EQ(rt.event_log()[1].seq, 2u);
  EXPECT_EQ(rt.event_log()[1].input, "7;99;100");
  EXPECT_TRUE(rt.event_log()[0].outcome.applied);
  EXPECT_FALSE(rt.event_log()[1].outcome.applied);
  std::vector<std::string> outcomes;
  for (const auto& l : log)
    if (l.rfind("warning:", 0) != 0) outcomes.push_back(l);
  ASSERT_EQ(outcomes.size(), 2u);
  EXPECT_EQ(outcomes[0].rfind("1 applied ", 0), 0u) << outcomes[0];
  EXPECT_EQ(outcomes[1].rfind("2 skipped(", 0), 0u) << outcomes[1];
}

TEST(Dispatch, ReplayReproducesDatabase) {
  const auto events = simulate(Scenario::double_triathlon(3, 9));
  auto a = triathlon_runtime(synthetic_runners(3));
  for (const auto& e : events) a.dispatch(e);
  auto b = triathlon_runtime(synthetic_runners(3));
  for (const auto& entry : a.event_log()) {
    const bool tagged = entry.event && std::holds_alternative<RfidTag>(entry.event->competitor);
    b.dispatch_line(entry.input, tagged ? EventMode::Auto : EventMode::Manual);
  }
  EXPECT_EQ(a.database(), b.database());
}

TEST(Batch, ProcessesAndArchives) {
  TempDir tmp;
  auto rt = triathlon_runtime(runners());
  const auto file = tmp / "events.txt";
  std::ofstream(file) << "# header\n7;1;100\n\n8;2;200\nbad line\n7;1;300\n";
  const auto s = process_batch(rt, file, tmp / "archive");
  EXPECT_EQ(s.applied, 3u);
  EXPECT_EQ(s.skipped, 1u);
  EXPECT_EQ(s.applied + s.skipped, rt.received());
  EXPECT_FALSE(std::filesystem::exists(file));
  EXPECT_TRUE(std::filesystem::exists(s.archivedTo));
  EXPECT_EQ(s.archivedTo.parent_path(), tmp / "archive");
  EXPECT_EQ(s.archivedTo.filename().string().rfind("events.txt.", 0), 0u);
  EXPECT_EQ(rt.database().get(7, "SWIM"), 300);
  EXPECT_EQ(rt.database().get(8, "TRANS1"), 200);
}

TEST(Batch, EmptyFileAndMissingFile) {
  TempDir tmp;
  auto rt = triathlon_runtime(runners());
  std::ofstream(tmp / "empty.txt").flush();
  const auto s = process_batch(rt, tmp / "empty.txt", tmp / "archive");
  EXPECT_EQ(s.applied, 0u);
  EXPECT_EQ(s.skipped, 0u);
  EXPECT_TRUE(std::filesystem::exists(s.archivedTo));
  EXPECT_THROW(process_batch(rt, tmp / "nope.txt", tmp / "archive"), StoreError);
  EXPECT_EQ(rt.received(), 0u);
}

TEST(Batch, TwoArchivesDoNotCollide) {
  TempDir tmp;
  auto rt = triathlon_runtime(runners());
  std::ofstream(tmp / "e.txt") << "7;1;1\n";
  const auto a = process_batch(rt, tmp / "e.txt", tmp / "archive");
  std::ofstream(tmp / "e.txt") << "7;1;2\n";
  const auto b = process_batch(rt, tmp / "e.txt", tmp / "archive");
  EXPECT_NE(a.archivedTo, b.archivedTo);
  EXPECT_TRUE(std::filesystem::exists(a.archivedTo));
}

TEST(LoadRuntime, FromDataDir) {
  TempDir tmp;
  const DataDir dir{tmp / "data"};
  dir.ensure();
  const auto r = compile_source(testgen::fixture("triathlon.et"));
  save_code(dir.pgm(), *r.unit);
  save_runners(dir.runners(), runners());
  save_results(dir.results(), create_db(r.state, runners()));
  auto rt = load_runtime(dir);
  rt.set_log_sink([](const std::string&) {});
  EXPECT_EQ(rt.unit(), *r.unit);
  // pgm.txt is read once; changing it later has no effect on this runtime
  std::ofstream(dir.pgm()) << "garbage";
  EXPECT_TRUE(rt.dispatch_line("7;2;400", EventMode::Manual).applied);
  EXPECT_EQ(rt.database().get(7, "TRANS1"), 400);
}

TEST(ApplyQueue, SerializesInSubmissionOrder) {
  std::atomic<int> idle{0};
  ApplyQueue q(triathlon_runtime(runners()), [&](const AgentRuntime&) { ++idle; });
  std::vector<std::future<Outcome>> fs;
  for (int i = 1; i <= 20; ++i) fs.push_back(q.submit_line("7;1;" + std::to_string(i), EventMode::Manual));
  for (std::size_t i = 0; i < fs.size(); ++i) EXPECT_EQ(fs[i].get().seq, i + 1);
  q.drain();
  q.read([](const AgentRuntime& rt) {
    EXPECT_EQ(rt.database().get(7, "ROUND1"), 0);
    EXPECT_EQ(rt.database().get(7, "SWIM"), 20);
    return 0;
  });
  EXPECT_GE(idle.load(), 1);
  q.stop();
  EXPECT_THROW(q.submit_line("7;1;1", EventMode::Manual).get(), std::runtime_error);
}

TEST(Tcp, LinesAppliedInOrder) {
  ApplyQueue q(triathlon_runtime(runners()));
  TcpLineServer server(q, 0, "127.0.0.1");
  server.start();
  ASSERT_NE(server.port(), 0);
  stream_lines_tcp("127.0.0.1", server.port(), {"7;TAG42;3;5000", "7;TAG7;3;5100", "garbage", "8;TAG42;4;6000"});
  // the server reads asynchronously; wait until all four lines are in the log
  for (int i = 0; i < 200 && q.read([](const AgentRuntime& rt) { return rt.received(); }) < 4; ++i)
    std::this_thread::sleep_for(std::chrono::milliseconds(10));
  q.drain();
  q.read([](const AgentRuntime& rt) {
    EXPECT_EQ(rt.received(), 4u);
    EXPECT_EQ(rt.database().get(8, "INTER2"), 5000);
    EXPECT_EQ(rt.database().get(7, "INTER2"), 5100);
    EXPECT_EQ(rt.database().get(8, "TRANS2"), 6000);
    EXPECT_EQ(rt.event_log()[2].outcome.applied, false);
    return 0;
  });
  server.stop();
}

TEST(Tcp, ConcurrentConnections) {
  ApplyQueue q(triathlon_runtime(synthetic_runners(4)));
  TcpLineServer server(q, 0, "127.0.0.1");
  server.start();
  std::vector<std::thread> clients;
  for (int c = 1; c <= 4; ++c) {
    clients.emplace_back([&, c] {
      std::vector<std::string> lines;
      for (int k = 0; k < 25; ++k)
        lines.push_back(std::to_string(c) + ";" + synthetic_rfid(c) + ";3;" + std::to_string(100 + k));
      stream_lines_tcp("127.0.0.1", server.port(), lines);
    });
  }
  for (auto& t : clients) t.join();
  for (int i = 0; i < 300 && q.read([](const AgentRuntime& rt) { return rt.received(); }) < 100; ++i)
    std::this_thread::sleep_for(std::chrono::milliseconds(10));
  server.stop();
  q.drain();
  q.read([](const AgentRuntime& rt) {
    EXPECT_EQ(rt.received(), 100u);
    for (int c = 1; c <= 4; ++c) {
      EXPECT_EQ(rt.database().get(c, "ROUND2"), 80);
      EXPECT_EQ(rt.database().get(c, "INTER2"), 124);  // per-connection order preserved
    }
    return 0;
  });
}

class HttpFixture : public ::testing::Test {
 protected:
  void SetUp() override {
    queue = std::make_unique<ApplyQueue>(triathlon_runtime(runners()));
    api = std::make_unique<HttpApi>(*queue, [] { return std::int64_t{4242}; });
    api->start(0, "127.0.0.1");
    client = std::make_unique<httplib::Client>("127.0.0.1", api->port());
  }
  void TearDown() override {
    api->stop();
    queue->stop();
  }
  std::unique_ptr<ApplyQueue> queue;
  std::unique_ptr<HttpApi> api;
  std::unique_ptr<httplib::Client> client;
};

TEST_F(HttpFixture, PostEventThenResults) {
  auto res = client->Post("/events", R"({"competitor": 7, "mp": 2, "time": 4000})", "application/json");
  ASSERT_TRUE(res);
  EXPECT_EQ(res->status, 200);
  const auto body = json::parse(res->body);
  EXPECT_EQ(body["outcome"], "applied");
  EXPECT_EQ(body["seq"], 1);
  EXPECT_EQ(res->get_header_value("Access-Control-Allow-Origin"), "*");

  res = client->Get("/results?sort=TRANS1");
  ASSERT_TRUE(res);
  EXPECT_EQ(res->status, 200);
  const auto results = json::parse(res->body);
  ASSERT_EQ(results["rows"].size(), 2u);
  EXPECT_EQ(results["rows"][0]["id"], 7);
  EXPECT_EQ(results["rows"][0]["value"], 4000);
  EXPECT_EQ(results["rows"][0]["rank"], 1);
  EXPECT_EQ(results["rows"][1]["dnf"], true);
}

TEST_F(HttpFixture, MissingTimeUsesServerClock) {
  auto res = client->Post("/events", R"({"competitor": 8, "mp": 1})", "application/json");
  ASSERT_TRUE(res);
  EXPECT_EQ(json::parse(res->body)["time"], 4242);
  queue->drain();
  EXPECT_EQ(queue->read([](const AgentRuntime& rt) { return *rt.database().get(8, "SWIM"); }), 4242);
}

TEST_F(HttpFixture, BadRequests) {
  for (const char* body : {"not json", "[]", R"({"mp": 1})", R"({"competitor": 7, "mp": 0})",
                           R"({"competitor": 7, "mp": 1, "time": -1})", R"({"competitor": "7", "mp": 1})"}) {
    auto res = client->Post("/events", body, "application/json");
    ASSERT_TRUE(res);
    EXPECT_EQ(res->status, 400) << body;
  }
  auto res = client->Get("/results?sort=NOSUCH");
  ASSERT_TRUE(res);
  EXPECT_EQ(res->status, 400);
  EXPECT_EQ(json::parse(res->body)["error"], "UnknownColumn");
  res = client->Get("/results");
  EXPECT_EQ(res->status, 400);
  EXPECT_EQ(queue->read([](const AgentRuntime& rt) { return rt.received(); }), 0u);
}

TEST_F(HttpFixture, SkippedEventIsStill200) {
  auto res = client->Post("/events", R"({"competitor": 99, "mp": 1, "time": 5})", "application/json");
  ASSERT_TRUE(res);
  EXPECT_EQ(res->status, 200);
  const auto body = json::parse(res->body);
  EXPECT_EQ(body["outcome"], "skipped");
  EXPECT_EQ(body["reason"], "unknown competitor 99");
}

TEST_F(HttpFixture, EventsAndHealth) {
  client->Post("/events", R"({"competitor": 7, "mp": 1, "time": 10})", "application/json");
  client->Post("/events", R"({"competitor": 7, "mp": 1, "time": 20})", "application/json");
  auto res = client->Get("/events?limit=1");
  ASSERT_TRUE(res);
  const auto ev = json::parse(res->body);
  EXPECT_EQ(ev["received"], 2);
  ASSERT_EQ(ev["events"].size(), 1u);
  EXPECT_EQ(ev["events"][0]["seq"], 2);

  res = client->Get("/health");
  ASSERT_TRUE(res);
  const auto h = json::parse(res->body);
  EXPECT_EQ(h["status"], "ok");
  EXPECT_EQ(h["competitors"], 2);
  EXPECT_EQ(h["measuringPlaces"], json::array({1, 2, 3, 4}));

  res = client->Options("/events");
  ASSERT_TRUE(res);
  EXPECT_EQ(res->status, 204);
}
