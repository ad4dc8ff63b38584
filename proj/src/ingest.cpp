/*
 * SPDX-FileCopyrightText: Copyright (c) 2026 The bletrack Authors
 * SPDX-License-Identifier: Apache-2.0
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */
#include "bletrack/ingest.hpp"

#include "bletrack/error.hpp"
#include "bletrack/wire.hpp"

#include <netdb.h>
#include <netinet/in.h>
#include <netinet/tcp.h>
#include <poll.h>
#include <sys/socket.h>
#include <sys/types.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>
#include <iostream>
#include <map>

namespace bletrack {

namespace {

constexpr int kPollMs = 50;

class Fd {
public:
  explicit Fd(int fd = -1) noexcept : fd_(fd) {}
  ~Fd() { reset(); }
  Fd(Fd&& o) noexcept : fd_(std::exchange(o.fd_, -1)) {}
  Fd& operator=(Fd&& o) noexcept {
    if (this != &o) {
      reset();
      fd_ = std::exchange(o.fd_, -1);
    }
    return *this;
  }
  int get() const noexcept { return fd_; }
  int release() noexcept { return std::exchange(fd_, -1); }
  void reset() noexcept {
    if (fd_ >= 0)
      ::close(fd_);
    fd_ = -1;
  }

private:
  int fd_;
};

struct AddrInfoDeleter {
  void operator()(addrinfo* ai) const noexcept { freeaddrinfo(ai); }
};
using AddrInfoPtr = std::unique_ptr<addrinfo, AddrInfoDeleter>;

AddrInfoPtr resolve(const std::string& host, int port, bool passive) {
  addrinfo hints{};
  hints.ai_family = AF_UNSPEC;
  hints.ai_socktype = SOCK_STREAM;
  if (passive)
    hints.ai_flags = AI_PASSIVE;
  addrinfo* res = nullptr;
  const std::string service = std::to_string(port);
  const int rc = getaddrinfo(host.empty() ? nullptr : host.c_str(), service.c_str(), &hints, &res);
  if (rc != 0)
    throw Error(passive ? ErrorCode::BindFailure : ErrorCode::Network,
                "cannot resolve " + host + ": " + gai_strerror(rc));
  return AddrInfoPtr(res);
}

Fd connect_to(const std::string& host, int port) {
  auto ai = resolve(host, port, false);
  for (addrinfo* p = ai.get(); p; p = p->ai_next) {
    Fd fd(::socket(p->ai_family, p->ai_socktype, p->ai_protocol));
    if (fd.get() < 0)
      continue;
    if (::connect(fd.get(), p->ai_addr, p->ai_addrlen) == 0) {
      int one = 1;
      ::setsockopt(fd.get(), IPPROTO_TCP, TCP_NODELAY, &one, sizeof one);
      return fd;
    }
  }
  throw Error(ErrorCode::Network, "cannot connect to " + host + ":" + std::to_string(port));
}

void send_all(int fd, std::string_view data) {
  while (!data.empty()) {
    const ssize_t n = ::send(fd, data.data(), data.size(), MSG_NOSIGNAL);
    if (n < 0) {
      if (errno == EINTR)
        continue;
      throw Error(ErrorCode::Network, std::string("send failed: ") + std::strerror(errno));
    }
    data.remove_prefix(static_cast<std::size_t>(n));
  }
}

} // namespace

struct IngestServer::Connection {
  Fd fd;
  std::thread worker;
  std::atomic<bool> done{false};
};

IngestServer::IngestServer(TrackerConfig tracker, IngestOptions options,
                           std::optional<std::filesystem::path> log_path)
    : options_(std::move(options)),
      router_(std::move(tracker), RouterOptions{options_.reorder_watermark_ms, true}) {
  if (log_path)
    log_.emplace(*log_path);
}

IngestServer::~IngestServer() {
  try {
    stop();
  } catch (const std::exception& e) {
    std::cerr << "bletrack: error while stopping ingest: " << e.what() << '\n';
  }
}

void IngestServer::start() {
  const auto [host, port] = split_host_port(options_.listen);
  auto ai = resolve(host, port, true);
  std::string last_error = "no usable address";
  for (addrinfo* p = ai.get(); p; p = p->ai_next) {
    Fd fd(::socket(p->ai_family, p->ai_socktype, p->ai_protocol));
    if (fd.get() < 0)
      continue;
    int one = 1;
    ::setsockopt(fd.get(), SOL_SOCKET, SO_REUSEADDR, &one, sizeof one);
    if (::bind(fd.get(), p->ai_addr, p->ai_addrlen) != 0 || ::listen(fd.get(), 64) != 0) {
      last_error = std::strerror(errno);
      continue;
    }
    sockaddr_storage bound{};
    socklen_t len = sizeof bound;
    ::getsockname(fd.get(), reinterpret_cast<sockaddr*>(&bound), &len);
    port_ = bound.ss_family == AF_INET6
                ? ntohs(reinterpret_cast<sockaddr_in6*>(&bound)->sin6_port)
                : ntohs(reinterpret_cast<sockaddr_in*>(&bound)->sin_port);
    listen_fd_ = fd.release();
    acceptor_ = std::thread([this] { accept_loop(); });
    return;
  }
  throw Error(ErrorCode::BindFailure, "cannot listen on " + options_.listen + ": " + last_error);
}

void IngestServer::subscribe(RecordCallback callback) {
  std::lock_guard lock(mutex_);
  subscribers_.push_back(std::move(callback));
}

IngestStats IngestServer::stats() const {
  std::lock_guard lock(mutex_);
  IngestStats s = stats_;
  s.late_dropped = router_.stats().late_dropped;
  s.unknown_anchor = router_.stats().unknown_anchor;
  return s;
}

bool IngestServer::wait_idle(std::chrono::milliseconds idle, std::chrono::milliseconds timeout) {
  const auto deadline = std::chrono::steady_clock::now() + timeout;
  std::unique_lock lock(mutex_);
  for (;;) {
    const auto now = std::chrono::steady_clock::now();
    if (stats_.connections_total > 0 && stats_.connections_open == 0 && now - last_disconnect_ >= idle)
      return true;
    if (now >= deadline)
      return false;
    idle_cv_.wait_for(lock, std::chrono::milliseconds(kPollMs));
  }
}

void IngestServer::accept_loop() {
  while (!stopping_) {
    pollfd pfd{listen_fd_, POLLIN, 0};
    const int rc = ::poll(&pfd, 1, kPollMs);
    if (rc <= 0)
      continue;
    const int client = ::accept(listen_fd_, nullptr, nullptr);
    if (client < 0)
      continue;

    std::lock_guard conn_lock(conn_mutex_);
    // Reap finished workers.
    for (auto it = connections_.begin(); it != connections_.end();) {
      if ((*it)->done) {
        (*it)->worker.join();
        it = connections_.erase(it);
      } else {
        ++it;
      }
    }
    {
      std::lock_guard lock(mutex_);
      ++stats_.connections_total;
      ++stats_.connections_open;
    }
    auto conn = std::make_unique<Connection>();
    conn->fd = Fd(client);
    Connection& ref = *conn;
    connections_.push_back(std::move(conn));
    ref.worker = std::thread([this, &ref] { serve_connection(ref); });
  }
}

void IngestServer::serve_connection(Connection& conn) {
  std::string buffer;
  bool discarding = false; // inside an over-long line
  char chunk[4096];
  while (!stopping_) {
    pollfd pfd{conn.fd.get(), POLLIN, 0};
    const int rc = ::poll(&pfd, 1, kPollMs);
    if (rc == 0)
      continue;
    if (rc < 0 && errno == EINTR)
      continue;
    const ssize_t n = rc < 0 ? -1 : ::recv(conn.fd.get(), chunk, sizeof chunk, 0);
    if (n <= 0)
      break;
    buffer.append(chunk, static_cast<std::size_t>(n));

    std::size_t start = 0;
    for (;;) {
      const auto nl = buffer.find('\n', start);
      if (nl == std::string::npos)
        break;
      if (discarding) {
        discarding = false;
      } else {
        handle_line(std::string_view(buffer).substr(start, nl - start));
      }
      start = nl + 1;
    }
    buffer.erase(0, start);
    if (buffer.size() > kMaxWireLineBytes) {
      if (!discarding) {
        std::lock_guard lock(mutex_);
        ++stats_.lines;
        ++stats_.parse_errors;
      }
      discarding = true;
      buffer.clear();
    }
  }
  if (!buffer.empty() && !discarding)
    handle_line(buffer);

  {
    std::lock_guard lock(mutex_);
    --stats_.connections_open;
    last_disconnect_ = std::chrono::steady_clock::now();
  }
  idle_cv_.notify_all();
  conn.done = true;
}

void IngestServer::handle_line(std::string_view line) {
  if (!line.empty() && line.back() == '\r')
    line.remove_suffix(1);
  if (line.empty())
    return;

  std::optional<RawReport> report;
  bool parse_failed = false;
  try {
    report = parse_report(line);
  } catch (const Error&) {
    parse_failed = true;
  }

  std::lock_guard lock(mutex_);
  ++stats_.lines;
  if (parse_failed) {
    ++stats_.parse_errors;
    return;
  }
  if (router_.push(std::move(*report)) == PushResult::Accepted)
    emit(router_.poll());
}

// Caller holds mutex_.
void IngestServer::emit(const std::vector<TrajectoryLogRecord>& records) {
  if (records.empty())
    return;
  stats_.records += records.size();
  if (log_)
    log_->append(records);
  for (const auto& r : records)
    for (const auto& cb : subscribers_)
      cb(r);
}

void IngestServer::stop() {
  if (stopped_)
    return;
  stopped_ = true;
  stopping_ = true;
  if (acceptor_.joinable())
    acceptor_.join();
  {
    std::lock_guard conn_lock(conn_mutex_);
    for (auto& c : connections_)
      if (c->worker.joinable())
        c->worker.join();
    connections_.clear();
  }
  if (listen_fd_ >= 0) {
    ::close(listen_fd_);
    listen_fd_ = -1;
  }
  std::lock_guard lock(mutex_);
  emit(router_.flush());
}

ReplayStats replay(std::span<const std::string> lines, const std::string& host, int port,
                   const ReplayOptions& options) {
  struct Item {
    std::string_view line;
    std::optional<std::int64_t> ts;
  };
  std::map<std::string, std::vector<Item>> channels;
  std::optional<std::int64_t> t0;
  std::string last_channel;
  for (const auto& line : lines) {
    if (line.empty())
      continue;
    Item item{line, std::nullopt};
    std::string channel;
    try {
      const RawReport r = parse_report(line);
      item.ts = r.timestamp_ms;
      t0 = t0 ? std::min(*t0, r.timestamp_ms) : r.timestamp_ms;
      channel = options.per_anchor ? r.anchor_id : std::string();
    } catch (const Error&) {
      channel = options.per_anchor ? last_channel : std::string();
    }
    last_channel = channel;
    channels[channel].push_back(item);
  }

  ReplayStats stats;
  if (channels.empty())
    return stats;

  const auto start = std::chrono::steady_clock::now();
  auto send_channel = [&](const std::vector<Item>& items, std::uint64_t& sent) {
    Fd fd = connect_to(host, port);
    std::string batch;
    for (const auto& item : items) {
      if (options.speed > 0.0 && item.ts && t0) {
        const auto due = start + std::chrono::duration_cast<std::chrono::steady_clock::duration>(
                                     std::chrono::duration<double, std::milli>(
                                         static_cast<double>(*item.ts - *t0) / options.speed));
        if (due > std::chrono::steady_clock::now()) {
          send_all(fd.get(), batch);
          batch.clear();
          std::this_thread::sleep_until(due);
        }
      }
      batch.append(item.line);
      batch += '\n';
      ++sent;
      if (batch.size() > 64 * 1024) {
        send_all(fd.get(), batch);
        batch.clear();
      }
    }
    send_all(fd.get(), batch);
    ::shutdown(fd.get(), SHUT_WR);
  };

  std::vector<std::uint64_t> sent(channels.size(), 0);
  std::vector<std::exception_ptr> errors(channels.size());
  std::vector<std::thread> workers;
  std::size_t i = 0;
  for (const auto& [name, items] : channels) {
    const std::size_t idx = i++;
    workers.emplace_back([&, idx, &items = items] {
      try {
        send_channel(items, sent[idx]);
      } catch (...) {
        errors[idx] = std::current_exception();
      }
    });
  }
  for (auto& w : workers)
    w.join();
  for (auto& e : errors)
    if (e)
      std::rethrow_exception(e);

  stats.connections = channels.size();
  for (auto n : sent)
    stats.lines_sent += n;
  return stats;
}

} // namespace bletrack
