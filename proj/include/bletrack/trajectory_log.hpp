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

// Trajectory log (CSV) persistence and exports.
//
// The log is append-only: a header line, then one newline-terminated row per
// record with fields in TrajectoryLogRecord order. A file cut at any record
// boundary still parses; a trailing partial row is ignored.

#include "bletrack/pipeline.hpp"
#include "bletrack/simulator.hpp"
#include "bletrack/wander.hpp"

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace bletrack {

inline constexpr std::string_view kLogHeader =
    "tag_id,t_ms,x_m,y_m,vx_mps,vy_mps,p_trace,n_anchors_used,coast_flag";

std::string format_log_row(const TrajectoryLogRecord& rec);
std::string format_log(std::span<const TrajectoryLogRecord> records);

struct ParsedLog {
  std::vector<TrajectoryLogRecord> records;
  bool truncated_tail = false; ///< a final unterminated row was skipped
};

/// Throws Error(Malformed) on a bad header or row.
ParsedLog parse_log(std::string_view text);
ParsedLog read_log(const std::filesystem::path& path);

/// Append-only writer. Writes the header when the file is new or empty and
/// flushes after every batch.
class LogWriter {
public:
  explicit LogWriter(const std::filesystem::path& path);
  void append(std::span<const TrajectoryLogRecord> records);

private:
  std::ofstream out_;
};

void write_log(const std::filesystem::path& path, std::span<const TrajectoryLogRecord> records);

/// FeatureCollection with one LineString per tag; per-point timestamps are in
/// properties.t_ms.
std::string export_geojson(std::span<const TrajectoryLogRecord> records);

/// Episode report CSV; times as ISO-8601 UTC.
inline constexpr std::string_view kEpisodeHeader =
    "tag_id,start,end,distance_m,extent_m,mean_speed_mps";
std::string format_episode_report(std::span<const WanderEpisode> episodes);

/// Seconds since the epoch to "YYYY-MM-DDTHH:MM:SS.mmmZ".
std::string iso8601_utc(double epoch_seconds);

/// Ground truth as CSV: tag_id,t_ms,x_m,y_m.
std::string format_ground_truth(std::span<const GroundTruthSample> truth, std::int64_t start_ms);

/// Emitted reports as wire lines, each newline-terminated.
std::string format_report_lines(std::span<const RawReport> reports);

/// Reads a whole file. Throws Error(IoFailure).
std::string read_file(const std::filesystem::path& path);
/// Replaces the file contents. Throws Error(IoFailure).
void write_file(const std::filesystem::path& path, std::string_view contents);
/// Splits on '\n'; an unterminated last line is included.
std::vector<std::string> split_lines(std::string_view text);

} // namespace bletrack
