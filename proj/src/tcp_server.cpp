#include <arpa/inet.h>
#include <netdb.h>
#include <netinet/in.h>
#include <poll.h>
#include <sys/socket.h>
#include <unistd.h>

#include <cerrno>
#include <chrono>
#include <cstring>
#include <stdexcept>

#include "easytime/service.hpp"

namespace easytime {

namespace {

std::runtime_error sys_error(const std::string& what) { return std::runtime_error(what + ": " + std::strerror(errno)); }

bool send_all(int fd, std::string_view data) {
  while (!data.empty()) {
    const ssize_t n = ::send(fd, data.data(), data.size(), MSG_NOSIGNAL);
    if (n < 0) {
      if (errno == EINTR) continue;
      return false;
    }
    data.remove_prefix(static_cast<std::size_t>(n));
  }
  return true;
}

}  // namespace

TcpLineServer::TcpLineServer(ApplyQueue& queue, std::uint16_t port, std::string bindAddress)
    : queue_(queue), port_(port), bindAddress_(std::move(bindAddress)) {}

TcpLineServer::~TcpLineServer() { stop(); }

void TcpLineServer::start() {
  listenFd_ = ::socket(AF_INET, SOCK_STREAM, 0);
  if (listenFd_ < 0) throw sys_error("socket");
  int opt = 1;
  ::setsockopt(listenFd_, SOL_SOCKET, SO_REUSEADDR, &opt, sizeof(opt));

  sockaddr_in addr{};
  addr.sin_family = AF_INET;
  addr.sin_port = htons(port_);
  if (::inet_pton(AF_INET, bindAddress_.c_str(), &addr.sin_addr) != 1) {
    ::close(listenFd_);
    listenFd_ = -1;
    throw std::runtime_error("bad bind address " + bindAddress_);
  }
  if (::bind(listenFd_, reinterpret_cast<sockaddr*>(&addr), sizeof(addr)) < 0 || ::listen(listenFd_, 16) < 0) {
    const auto err = sys_error("bind tcp port " + std::to_string(port_));
    ::close(listenFd_);
    listenFd_ = -1;
    throw err;
  }
  socklen_t len = sizeof(addr);
  ::getsockname(listenFd_, reinterpret_cast<sockaddr*>(&addr), &len);
  port_ = ntohs(addr.sin_port);

  running_ = true;
  acceptThread_ = std::thread([this] { accept_loop(); });
}

void TcpLineServer::stop() {
  if (!running_.exchange(false)) return;
  if (acceptThread_.joinable()) acceptThread_.join();
  ::close(listenFd_);
  listenFd_ = -1;

  std::vector<std::thread> threads;
  {
    std::lock_guard lock(connMutex_);
    for (int fd : connFds_) ::shutdown(fd, SHUT_RDWR);
    threads.swap(connThreads_);
  }
  for (auto& t : threads)
    if (t.joinable()) t.join();
}

void TcpLineServer::accept_loop() {
  while (running_) {
    pollfd pfd{listenFd_, POLLIN, 0};
    const int ready = ::poll(&pfd, 1, 100);
    if (ready <= 0) continue;
    sockaddr_in peer{};
    socklen_t len = sizeof(peer);
    const int fd = ::accept(listenFd_, reinterpret_cast<sockaddr*>(&peer), &len);
    if (fd < 0) continue;
    char buf[INET_ADDRSTRLEN] = {};
    ::inet_ntop(AF_INET, &peer.sin_addr, buf, sizeof(buf));

    std::lock_guard lock(connMutex_);
    connFds_.push_back(fd);
    connThreads_.emplace_back([this, fd, ip = std::string(buf)] { serve_connection(fd, ip); });
  }
}

void TcpLineServer::serve_connection(int fd, std::string peer) {
  const EventSource delivery{SourceKind::Connect, peer};
  std::string pending;
  char buf[4096];
  while (true) {
    const ssize_t n = ::recv(fd, buf, sizeof(buf), 0);
    if (n < 0 && errno == EINTR) continue;
    if (n <= 0) break;
    pending.append(buf, static_cast<std::size_t>(n));
    std::size_t start = 0;
    for (auto nl = pending.find('\n', start); nl != std::string::npos; nl = pending.find('\n', start)) {
      std::string line = pending.substr(start, nl - start);
      start = nl + 1;
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (line.empty()) continue;
      try {
        queue_.submit_line(std::move(line), EventMode::Auto, delivery);
      } catch (const std::runtime_error&) {
        break;  // queue stopped
      }
    }
    pending.erase(0, start);
  }
  // A final line without terminator is dropped: the protocol is newline-framed.
  std::lock_guard lock(connMutex_);
  ::close(fd);
  std::erase(connFds_, fd);
}

void stream_lines_tcp(const std::string& host, std::uint16_t port, const std::vector<std::string>& lines,
                      const std::vector<std::int64_t>& times, double speedup) {
  addrinfo hints{};
  hints.ai_family = AF_INET;
  hints.ai_socktype = SOCK_STREAM;
  addrinfo* res = nullptr;
  if (::getaddrinfo(host.c_str(), std::to_string(port).c_str(), &hints, &res) != 0 || !res)
    throw std::runtime_error("cannot resolve " + host);
  const int fd = ::socket(res->ai_family, res->ai_socktype, res->ai_protocol);
  if (fd < 0) {
    ::freeaddrinfo(res);
    throw sys_error("socket");
  }
  if (::connect(fd, res->ai_addr, res->ai_addrlen) < 0) {
    const auto err = sys_error("connect " + host + ":" + std::to_string(port));
    ::freeaddrinfo(res);
    ::close(fd);
    throw err;
  }
  ::freeaddrinfo(res);

  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (speedup > 0 && i > 0 && i < times.size() && times[i] > times[i - 1]) {
      const double seconds = static_cast<double>(times[i] - times[i - 1]) / speedup;
      std::this_thread::sleep_for(std::chrono::duration<double>(seconds));
    }
    if (!send_all(fd, lines[i] + "\n")) {
      ::close(fd);
      throw sys_error("send");
    }
  }
  ::shutdown(fd, SHUT_WR);
  ::close(fd);
}

}  // namespace easytime
