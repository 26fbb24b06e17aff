#pragma once

// Online processing: every channel feeds one FIFO apply queue that owns the
// runtime, so events are applied one at a time in arrival order.

#include <atomic>
#include <condition_variable>
#include <cstdint>
#include <deque>
#include <functional>
#include <future>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "easytime/runtime.hpp"

namespace easytime {

class ApplyQueue {
 public:
  /// `onIdle` runs on the worker, under the runtime lock, each time the
  /// queue empties (used to persist results.csv).
  explicit ApplyQueue(AgentRuntime runtime, std::function<void(const AgentRuntime&)> onIdle = {});
  ~ApplyQueue();

  ApplyQueue(const ApplyQueue&) = delete;
  ApplyQueue& operator=(const ApplyQueue&) = delete;

  std::future<Outcome> submit_line(std::string line, EventMode mode, std::optional<EventSource> delivery = {});
  std::future<Outcome> submit(TimingEvent event, std::optional<EventSource> delivery = {});

  /// Calls `f(runtime)` under the lock; the runtime is a consistent snapshot
  /// between events.
  template <typename F>
  auto read(F&& f) const {
    std::lock_guard lock(runtimeMutex_);
    return f(static_cast<const AgentRuntime&>(runtime_));
  }

  /// Blocks until every submitted event has been applied.
  void drain();
  /// Drains, then stops the worker. Later submissions fail with std::runtime_error.
  void stop();

 private:
  struct Job {
    std::function<Outcome(AgentRuntime&)> apply;
    std::promise<Outcome> done;
  };

  std::future<Outcome> enqueue(std::function<Outcome(AgentRuntime&)> apply);
  void worker();

  AgentRuntime runtime_;
  std::function<void(const AgentRuntime&)> onIdle_;
  mutable std::mutex runtimeMutex_;

  std::mutex queueMutex_;
  std::condition_variable wake_;
  std::condition_variable idle_;
  std::deque<Job> jobs_;
  bool busy_ = false;
  bool stopping_ = false;
  std::thread thread_;
};

/// Accepts device connections; each sends newline-terminated auto-mode lines.
class TcpLineServer {
 public:
  TcpLineServer(ApplyQueue& queue, std::uint16_t port, std::string bindAddress = "0.0.0.0");
  ~TcpLineServer();

  TcpLineServer(const TcpLineServer&) = delete;
  TcpLineServer& operator=(const TcpLineServer&) = delete;

  /// Binds and starts accepting. Throws std::runtime_error if the port is taken.
  void start();
  void stop();
  /// Actual port after start(); useful with port 0.
  std::uint16_t port() const { return port_; }

 private:
  void accept_loop();
  void serve_connection(int fd, std::string peer);

  ApplyQueue& queue_;
  std::uint16_t port_;
  std::string bindAddress_;
  int listenFd_ = -1;
  std::atomic<bool> running_{false};
  std::thread acceptThread_;
  std::mutex connMutex_;
  std::vector<int> connFds_;
  std::vector<std::thread> connThreads_;
};

/// JSON API: POST /events, GET /results?sort=VAR, GET /events, GET /health.
class HttpApi {
 public:
  using Clock = std::function<std::int64_t()>;

  HttpApi(ApplyQueue& queue, Clock clock = {});
  ~HttpApi();

  HttpApi(const HttpApi&) = delete;
  HttpApi& operator=(const HttpApi&) = delete;

  /// Binds (port 0 picks a free port) and serves on a background thread.
  void start(std::uint16_t port, const std::string& host = "0.0.0.0");
  void stop();
  std::uint16_t port() const { return port_; }

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
  std::uint16_t port_ = 0;
};

/// Sends lines to host:port, optionally pacing them by the gaps between event
/// times divided by `speedup` (no pacing when speedup <= 0).
void stream_lines_tcp(const std::string& host, std::uint16_t port, const std::vector<std::string>& lines,
                      const std::vector<std::int64_t>& times = {}, double speedup = 0);

}  // namespace easytime
