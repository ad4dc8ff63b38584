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
#pragma once

// Live ingest: a TCP listener that accepts any number of anchor connections,
// each carrying newline-delimited wire reports, and feeds them through a
// shared Router. Plus the matching replay client.

#include "bletrack/config.hpp"
#include "bletrack/pipeline.hpp"
#include "bletrack/trajectory_log.hpp"

#include <atomic>
#include <chrono>
#include <condition_variable>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <list>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <thread>
#include <vector>

namespace bletrack {

struct IngestStats {
  std::uint64_t connections_total = 0;
  std::uint64_t connections_open = 0;
  std::uint64_t lines = 0;
  std::uint64_t parse_errors = 0;
  std::uint64_t late_dropped = 0;
  std::uint64_t unknown_anchor = 0;
  std::uint64_t records = 0;
};

using RecordCallback = std::function<void(const TrajectoryLogRecord&)>;

class IngestServer {
public:
  /// `log_path`, when set, receives every record (append-only).
  IngestServer(TrackerConfig tracker, IngestOptions options,
               std::optional<std::filesystem::path> log_path = std::nullopt);
  ~IngestServer();

  IngestServer(const IngestServer&) = delete;
  IngestServer& operator=(const IngestServer&) = delete;

  /// Binds options.listen and starts accepting. Throws Error(BindFailure).
  void start();
  /// Bound port (useful with port 0).
  int port() const noexcept { return port_; }

  /// Callbacks run on ingest threads, serialized and in log order. They must
  /// not call back into the server.
  void subscribe(RecordCallback callback);

  IngestStats stats() const;

  /// Waits until at least one connection has come and gone and nothing has
  /// been connected for `idle`. Returns false on timeout.
  bool wait_idle(std::chrono::milliseconds idle, std::chrono::milliseconds timeout);

  /// Stops accepting, closes connections, and flushes all open windows.
  void stop();

private:
  struct Connection;

  void accept_loop();
  void serve_connection(Connection& conn);
  void handle_line(std::string_view line);
  void emit(const std::vector<TrajectoryLogRecord>& records);

  IngestOptions options_;
  Router router_;
  std::optional<LogWriter> log_;
  std::vector<RecordCallback> subscribers_;

  mutable std::mutex mutex_; // guards router_, log_, subscribers_, stats_
  IngestStats stats_;
  std::chrono::steady_clock::time_point last_disconnect_{};
  std::condition_variable idle_cv_;

  int listen_fd_ = -1;
  int port_ = 0;
  std::atomic<bool> stopping_{false};
  bool stopped_ = false;
  std::thread acceptor_;
  std::mutex conn_mutex_;
  std::list<std::unique_ptr<Connection>> connections_;
};

struct ReplayOptions {
  /// Playback rate relative to the report timestamps; <= 0 sends unpaced.
  double speed = 1.0;
  /// One connection per anchor instead of a single shared connection.
  bool per_anchor = false;
};

struct ReplayStats {
  std::uint64_t lines_sent = 0;
  std::uint64_t connections = 0;
};

/// Sends wire lines to host:port, paced by their timestamps. Throws
/// Error(Network).
ReplayStats replay(std::span<const std::string> lines, const std::string& host, int port,
                   const ReplayOptions& options = {});

} // namespace bletrack
