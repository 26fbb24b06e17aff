#include <stdexcept>

#include "easytime/service.hpp"

namespace easytime {

ApplyQueue::ApplyQueue(AgentRuntime runtime, std::function<void(const AgentRuntime&)> onIdle)
    : runtime_(std::move(runtime)), onIdle_(std::move(onIdle)), thread_([this] { worker(); }) {}

ApplyQueue::~ApplyQueue() { stop(); }

std::future<Outcome> ApplyQueue::enqueue(std::function<Outcome(AgentRuntime&)> apply) {
  Job job{std::move(apply), {}};
  auto fut = job.done.get_future();
  {
    std::lock_guard lock(queueMutex_);
    if (stopping_) throw std::runtime_error("apply queue is stopped");
    jobs_.push_back(std::move(job));
  }
  wake_.notify_one();
  return fut;
}

std::future<Outcome> ApplyQueue::submit_line(std::string line, EventMode mode, std::optional<EventSource> delivery) {
  return enqueue([line = std::move(line), mode, delivery = std::move(delivery)](AgentRuntime& rt) {
    return rt.dispatch_line(line, mode, delivery);
  });
}

std::future<Outcome> ApplyQueue::submit(TimingEvent event, std::optional<EventSource> delivery) {
  return enqueue([event = std::move(event), delivery = std::move(delivery)](AgentRuntime& rt) mutable {
    return rt.dispatch(std::move(event), delivery);
  });
}

void ApplyQueue::drain() {
  std::unique_lock lock(queueMutex_);
  idle_.wait(lock, [this] { return jobs_.empty() && !busy_; });
}

void ApplyQueue::stop() {
  {
    std::lock_guard lock(queueMutex_);
    stopping_ = true;
  }
  wake_.notify_all();
  if (thread_.joinable()) thread_.join();
}

void ApplyQueue::worker() {
  while (true) {
    Job job;
    {
      std::unique_lock lock(queueMutex_);
      wake_.wait(lock, [this] { return stopping_ || !jobs_.empty(); });
      if (jobs_.empty()) return;  // stopping and drained
      job = std::move(jobs_.front());
      jobs_.pop_front();
      busy_ = true;
    }

    Outcome outcome;
    bool nowIdle = false;
    {
      std::lock_guard rtLock(runtimeMutex_);
      try {
        outcome = job.apply(runtime_);
      } catch (const std::exception& e) {
        outcome = Outcome::skipped(std::string("internal error: ") + e.what());
      }
      {
        std::lock_guard lock(queueMutex_);
        nowIdle = jobs_.empty();
      }
      if (nowIdle && onIdle_) {
        try {
          onIdle_(runtime_);
        } catch (const std::exception&) {
          // Persistence failures must not stop event application; next idle retries.
        }
      }
    }
    job.done.set_value(std::move(outcome));

    {
      std::lock_guard lock(queueMutex_);
      busy_ = false;
    }
    idle_.notify_all();
  }
}

}  // namespace easytime
