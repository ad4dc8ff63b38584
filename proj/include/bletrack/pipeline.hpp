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

// Report routing and per-tag tracking. A Router buffers reports per tag,
// closes 1 s windows once the reorder watermark has passed them, and runs
// each closed window through packet grouping, averaging and one filter step.
//
// Window contents, not arrival order, determine the output: records come out
// sorted by (t_ms, tag_id) and are identical whether reports were pushed
// live with a watermark or all at once followed by flush().

#include "bletrack/ekf.hpp"
#include "bletrack/measurement.hpp"
#include "bletrack/wander.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace bletrack {

struct TrajectoryLogRecord {
  std::string tag_id;
  std::int64_t t_ms = 0; ///< window start
  double x_m = 0.0;
  double y_m = 0.0;
  double vx_mps = 0.0;
  double vy_mps = 0.0;
  double p_trace = 0.0;
  int n_anchors_used = 0;
  bool coast = false;

  bool operator==(const TrajectoryLogRecord&) const = default;
};

/// Record for a filter output, rounded to the log's resolution
/// (1 mm, 1 mm/s, 1e-4 for the covariance trace).
TrajectoryLogRecord make_record(std::string_view tag_id, std::int64_t t_ms, const StepResult& s);

class TagPipeline {
public:
  TagPipeline(std::string tag_id, const TrackerConfig& config);

  void add(RawReport report);

  /// Processes every window with start <= last_window, in order.
  void close_through(std::int64_t last_window, std::vector<TrajectoryLogRecord>& out);

  const std::optional<StateEstimate>& estimate() const noexcept { return est_; }
  std::size_t buffered() const noexcept;

private:
  void process_window(std::int64_t window, std::vector<TrajectoryLogRecord>& out);
  void coast_window(std::int64_t window, std::vector<TrajectoryLogRecord>& out);

  std::string tag_id_;
  const TrackerConfig* config_;
  std::map<std::int64_t, std::vector<RawReport>> buckets_; // keyed by window start
  std::optional<StateEstimate> est_;
  std::int64_t last_window_ = 0;
  int coast_count_ = 0;
};

struct RouterOptions {
  std::int64_t reorder_watermark_ms = 2000;
  /// Drop reports older than the watermark. Offline runs disable this and
  /// rely on flush().
  bool drop_late = true;
};

struct RouterStats {
  std::uint64_t accepted = 0;
  std::uint64_t late_dropped = 0;
  std::uint64_t unknown_anchor = 0;
  std::uint64_t records = 0;
};

enum class PushResult { Accepted, Late, UnknownAnchor };

class Router {
public:
  Router(TrackerConfig config, RouterOptions options = {});

  Router(const Router&) = delete;
  Router& operator=(const Router&) = delete;

  PushResult push(RawReport report);

  /// Records for windows the watermark has released since the last call.
  std::vector<TrajectoryLogRecord> poll();

  /// Closes all windows up to the last one that received data.
  std::vector<TrajectoryLogRecord> flush();

  const RouterStats& stats() const noexcept { return stats_; }
  /// max observed timestamp minus the reorder allowance
  std::optional<std::int64_t> watermark() const noexcept;

private:
  std::vector<TrajectoryLogRecord> close_through(std::int64_t last_window);

  TrackerConfig config_;
  RouterOptions options_;
  std::map<std::string, TagPipeline, std::less<>> tags_;
  std::optional<std::int64_t> max_ts_;
  std::optional<std::int64_t> closed_through_;
  RouterStats stats_;
};

struct OfflineResult {
  std::vector<TrajectoryLogRecord> records;
  std::uint64_t lines = 0;
  std::uint64_t parse_errors = 0;
  RouterStats router;
};

/// Batch tracking of wire-format lines: parse everything, then flush.
/// Unparseable lines are counted and skipped, as in live ingest.
OfflineResult run_offline(std::span<const std::string> lines, const TrackerConfig& config);

/// Batch tracking of already-decoded reports.
std::vector<TrajectoryLogRecord> track_reports(std::span<const RawReport> reports,
                                               const TrackerConfig& config);

/// One trajectory per tag, ascending tag_id, t in seconds.
std::vector<Trajectory> trajectories_from_log(std::span<const TrajectoryLogRecord> records);

} // namespace bletrack
