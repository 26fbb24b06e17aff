#include <httplib.h>

#include <ctime>
#include <json.hpp>
#include <stdexcept>

#include "easytime/service.hpp"
#include "easytime/store.hpp"

namespace easytime {

using nlohmann::json;

namespace {

void reply(httplib::Response& res, int status, const json& body) {
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

std::optional<std::int64_t> int_field(const json& body, const char* key) {
  auto it = body.find(key);
  if (it == body.end() || !it->is_number_integer()) return std::nullopt;
  return it->get<std::int64_t>();
}

json results_json(const AgentRuntime& rt, const std::string& sort, bool dnfZero) {
  const auto& db = rt.database();
  const auto ranked = rank_results(db, rt.registry(), sort, dnfZero);
  json rows = json::array();
  for (const auto& r : ranked) {
    json cells = json::object();
    if (const auto* row = db.find_row(r.id))
      for (std::size_t i = 0; i < db.variables().size(); ++i) cells[db.variables()[i]] = row->cells[i];
    rows.push_back({
        {"rank", r.rank ? json(*r.rank) : json(nullptr)},
        {"dnf", r.dnf()},
        {"id", r.id},
        {"lastName", r.lastName},
        {"firstName", r.firstName},
        {"value", r.sortKey ? json(*r.sortKey) : json(nullptr)},
        {"cells", cells},
    });
  }
  return {{"sort", sort}, {"columns", db.columns()}, {"rows", rows}};
}

}  // namespace

struct HttpApi::Impl {
  httplib::Server server;
  std::thread thread;
};

HttpApi::HttpApi(ApplyQueue& queue, Clock clock) : impl_(std::make_unique<Impl>()) {
  if (!clock) clock = [] { return static_cast<std::int64_t>(std::time(nullptr)); };
  auto& srv = impl_->server;

  srv.set_default_headers({{"Access-Control-Allow-Origin", "*"},
                           {"Access-Control-Allow-Headers", "Content-Type"},
                           {"Access-Control-Allow-Methods", "GET, POST, OPTIONS"}});
  srv.Options(R"(.*)", [](const httplib::Request&, httplib::Response& res) { res.status = 204; });

  srv.Post("/events", [&queue, clock](const httplib::Request& req, httplib::Response& res) {
    json body;
    try {
      body = json::parse(req.body);
    } catch (const json::exception&) {
      return reply(res, 400, {{"error", "MalformedEvent"}, {"reason", "body is not JSON"}});
    }
    if (!body.is_object()) return reply(res, 400, {{"error", "MalformedEvent"}, {"reason", "expected an object"}});
    const auto competitor = int_field(body, "competitor");
    const auto mp = int_field(body, "mp");
    if (!competitor || *competitor < 0)
      return reply(res, 400, {{"error", "MalformedEvent"}, {"reason", "competitor must be a non-negative integer"}});
    if (!mp || *mp < 1) return reply(res, 400, {{"error", "MalformedEvent"}, {"reason", "mp must be an integer >= 1"}});
    std::int64_t time = 0;
    if (body.contains("time")) {
      const auto t = int_field(body, "time");
      if (!t || *t < 0)
        return reply(res, 400, {{"error", "MalformedEvent"}, {"reason", "time must be a non-negative integer"}});
      time = *t;
    } else {
      time = clock();
    }

    TimingEvent e;
    e.competitor = StartNumber{*competitor};
    e.mpId = *mp;
    e.time = time;
    Outcome outcome;
    try {
      outcome = queue.submit(std::move(e)).get();
    } catch (const std::exception& ex) {
      return reply(res, 503, {{"error", "Unavailable"}, {"reason", ex.what()}});
    }
    json out = {{"seq", outcome.seq}, {"outcome", outcome.applied ? "applied" : "skipped"}, {"time", time}};
    if (!outcome.applied) out["reason"] = outcome.reason;
    reply(res, 200, out);
  });

  srv.Get("/results", [&queue](const httplib::Request& req, httplib::Response& res) {
    if (!req.has_param("sort")) return reply(res, 400, {{"error", "MissingParameter"}, {"parameter", "sort"}});
    const auto sort = req.get_param_value("sort");
    const bool dnfZero = !req.has_param("dnfZero") || req.get_param_value("dnfZero") != "0";
    try {
      auto body = queue.read([&](const AgentRuntime& rt) { return results_json(rt, sort, dnfZero); });
      reply(res, 200, body);
    } catch (const StoreError& e) {
      reply(res, 400, {{"error", "UnknownColumn"}, {"column", sort}, {"reason", e.what()}});
    }
  });

  srv.Get("/events", [&queue](const httplib::Request& req, httplib::Response& res) {
    std::size_t limit = 50;
    if (req.has_param("limit")) {
      try {
        limit = static_cast<std::size_t>(std::stoul(req.get_param_value("limit")));
      } catch (const std::exception&) {
        return reply(res, 400, {{"error", "BadParameter"}, {"parameter", "limit"}});
      }
    }
    auto body = queue.read([&](const AgentRuntime& rt) {
      const auto& log = rt.event_log();
      json events = json::array();
      const std::size_t from = log.size() > limit ? log.size() - limit : 0;
      for (std::size_t i = from; i < log.size(); ++i) {
        const auto& entry = log[i];
        json item = {{"seq", entry.seq},
                     {"outcome", entry.outcome.applied ? "applied" : "skipped"},
                     {"input", entry.input}};
        if (!entry.outcome.applied) item["reason"] = entry.outcome.reason;
        if (entry.event) {
          item["mp"] = entry.event->mpId;
          item["time"] = entry.event->time;
        }
        events.push_back(std::move(item));
      }
      return json{{"received", log.size()}, {"events", events}};
    });
    reply(res, 200, body);
  });

  srv.Get("/health", [&queue](const httplib::Request&, httplib::Response& res) {
    auto body = queue.read([](const AgentRuntime& rt) {
      json mps = json::array();
      for (const auto& u : rt.unit().units) mps.push_back(u.mpId);
      return json{{"status", "ok"},
                  {"received", rt.received()},
                  {"competitors", rt.database().rows().size()},
                  {"measuringPlaces", mps},
                  {"columns", rt.database().columns()}};
    });
    reply(res, 200, body);
  });
}

HttpApi::~HttpApi() { stop(); }

void HttpApi::start(std::uint16_t port, const std::string& host) {
  auto& srv = impl_->server;
  int bound = port == 0 ? srv.bind_to_any_port(host) : (srv.bind_to_port(host, port) ? port : -1);
  if (bound < 0) throw std::runtime_error("cannot bind http port " + std::to_string(port));
  port_ = static_cast<std::uint16_t>(bound);
  impl_->thread = std::thread([&srv] { srv.listen_after_bind(); });
  srv.wait_until_ready();
}

void HttpApi::stop() {
  if (!impl_) return;
  if (impl_->thread.joinable()) {
    impl_->server.stop();
    impl_->thread.join();
  }
}

}  // namespace easytime
