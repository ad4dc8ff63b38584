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
#include "bletrack/trajectory_log.hpp"

#include "bletrack/error.hpp"
#include "bletrack/wire.hpp"

#include <json.hpp>

#include <charconv>
#include <cmath>
#include <ctime>
#include <map>
#include <sstream>
#include <system_error>

namespace bletrack {

namespace {

void append_number(std::string& out, double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::fixed);
  out.append(buf, ptr);
}

template <typename T>
T parse_field(std::string_view field, std::size_t line_no) {
  T value{};
  auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
  if (ec != std::errc{} || ptr != field.data() + field.size())
    throw Error(ErrorCode::Malformed, "log line " + std::to_string(line_no) + ": bad field '" +
                                          std::string(field) + "'");
  return value;
}

std::vector<std::string_view> split_csv(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  for (;;) {
    const auto comma = line.find(',', start);
    fields.push_back(line.substr(start, comma - start));
    if (comma == std::string_view::npos)
      return fields;
    start = comma + 1;
  }
}

} // namespace

std::string format_log_row(const TrajectoryLogRecord& r) {
  std::string out = r.tag_id;
  out += ',';
  out += std::to_string(r.t_ms);
  for (double v : {r.x_m, r.y_m, r.vx_mps, r.vy_mps, r.p_trace}) {
    out += ',';
    append_number(out, v);
  }
  out += ',';
  out += std::to_string(r.n_anchors_used);
  out += r.coast ? ",1\n" : ",0\n";
  return out;
}

std::string format_log(std::span<const TrajectoryLogRecord> records) {
  std::string out(kLogHeader);
  out += '\n';
  for (const auto& r : records)
    out += format_log_row(r);
  return out;
}

ParsedLog parse_log(std::string_view text) {
  ParsedLog out;
  if (text.empty())
    return out;

  std::size_t pos = 0;
  std::size_t line_no = 0;
  while (pos < text.size()) {
    const auto nl = text.find('\n', pos);
    if (nl == std::string_view::npos) {
      out.truncated_tail = true;
      break;
    }
    std::string_view line = text.substr(pos, nl - pos);
    pos = nl + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r')
      line.remove_suffix(1);
    if (line_no == 1) {
      if (line != kLogHeader)
        throw Error(ErrorCode::Malformed, "trajectory log header mismatch");
      continue;
    }
    if (line.empty())
      continue;
    const auto f = split_csv(line);
    if (f.size() != 9)
      throw Error(ErrorCode::Malformed, "log line " + std::to_string(line_no) + ": expected 9 fields");
    TrajectoryLogRecord r;
    r.tag_id = std::string(f[0]);
    r.t_ms = parse_field<std::int64_t>(f[1], line_no);
    r.x_m = parse_field<double>(f[2], line_no);
    r.y_m = parse_field<double>(f[3], line_no);
    r.vx_mps = parse_field<double>(f[4], line_no);
    r.vy_mps = parse_field<double>(f[5], line_no);
    r.p_trace = parse_field<double>(f[6], line_no);
    r.n_anchors_used = parse_field<int>(f[7], line_no);
    const int coast = parse_field<int>(f[8], line_no);
    if (coast != 0 && coast != 1)
      throw Error(ErrorCode::Malformed, "log line " + std::to_string(line_no) + ": coast_flag");
    r.coast = coast == 1;
    out.records.push_back(std::move(r));
  }
  // A header cut mid-line is an empty log, not an error.
  if (line_no == 0)
    out.truncated_tail = true;
  return out;
}

ParsedLog read_log(const std::filesystem::path& path) { return parse_log(read_file(path)); }

LogWriter::LogWriter(const std::filesystem::path& path) {
  std::error_code ec;
  const bool fresh = !std::filesystem::exists(path, ec) || std::filesystem::file_size(path, ec) == 0;
  out_.open(path, std::ios::binary | std::ios::app);
  if (!out_)
    throw Error(ErrorCode::IoFailure, "cannot open log " + path.string());
  if (fresh) {
    out_ << kLogHeader << '\n';
    out_.flush();
  }
}

void LogWriter::append(std::span<const TrajectoryLogRecord> records) {
  if (records.empty())
    return;
  for (const auto& r : records)
    out_ << format_log_row(r);
  out_.flush();
  if (!out_)
    throw Error(ErrorCode::IoFailure, "log write failed");
}

void write_log(const std::filesystem::path& path, std::span<const TrajectoryLogRecord> records) {
  write_file(path, format_log(records));
}

std::string export_geojson(std::span<const TrajectoryLogRecord> records) {
  using nlohmann::ordered_json;
  std::map<std::string, std::vector<const TrajectoryLogRecord*>> by_tag;
  for (const auto& r : records)
    by_tag[r.tag_id].push_back(&r);

  ordered_json features = ordered_json::array();
  for (const auto& [tag, recs] : by_tag) {
    ordered_json coords = ordered_json::array();
    ordered_json times = ordered_json::array();
    for (const auto* r : recs) {
      coords.push_back({r->x_m, r->y_m});
      times.push_back(r->t_ms);
    }
    // A LineString needs two positions; a single fix is repeated.
    if (coords.size() == 1)
      coords.push_back(coords.front());
    features.push_back({{"type", "Feature"},
                        {"geometry", {{"type", "LineString"}, {"coordinates", coords}}},
                        {"properties", {{"tag_id", tag}, {"t_ms", times}}}});
  }
  ordered_json doc = {{"type", "FeatureCollection"}, {"features", features}};
  return doc.dump() + "\n";
}

std::string iso8601_utc(double epoch_seconds) {
  const auto total_ms = static_cast<std::int64_t>(std::llround(epoch_seconds * 1000.0));
  std::int64_t secs = total_ms / 1000;
  std::int64_t ms = total_ms % 1000;
  if (ms < 0) {
    ms += 1000;
    --secs;
  }
  const std::time_t tt = static_cast<std::time_t>(secs);
  std::tm tm{};
  gmtime_r(&tt, &tm);
  char buf[64];
  std::snprintf(buf, sizeof buf, "%04d-%02d-%02dT%02d:%02d:%02d.%03dZ", tm.tm_year + 1900,
                tm.tm_mon + 1, tm.tm_mday, tm.tm_hour, tm.tm_min, tm.tm_sec, static_cast<int>(ms));
  return buf;
}

std::string format_episode_report(std::span<const WanderEpisode> episodes) {
  std::string out(kEpisodeHeader);
  out += '\n';
  char buf[128];
  for (const auto& e : episodes) {
    std::snprintf(buf, sizeof buf, ",%.2f,%.2f,%.3f\n", e.distance_m, e.extent_m, e.mean_speed_mps);
    out += e.tag_id + ',' + iso8601_utc(e.start_t) + ',' + iso8601_utc(e.end_t) + buf;
  }
  return out;
}

std::string format_ground_truth(std::span<const GroundTruthSample> truth, std::int64_t start_ms) {
  std::string out = "tag_id,t_ms,x_m,y_m\n";
  char buf[96];
  for (const auto& g : truth) {
    std::snprintf(buf, sizeof buf, ",%lld,%.3f,%.3f\n",
                  static_cast<long long>(start_ms + std::llround(g.t * 1000.0)), g.x, g.y);
    out += g.tag_id + buf;
  }
  return out;
}

std::string format_report_lines(std::span<const RawReport> reports) {
  std::string out;
  out.reserve(reports.size() * 64);
  for (const auto& r : reports) {
    out += format_report(r);
    out += '\n';
  }
  return out;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw Error(ErrorCode::IoFailure, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::filesystem::path& path, std::string_view contents) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out)
    throw Error(ErrorCode::IoFailure, "cannot write " + path.string());
  out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
  if (!out)
    throw Error(ErrorCode::IoFailure, "write failed for " + path.string());
}

std::vector<std::string> split_lines(std::string_view text) {
  std::vector<std::string> lines;
  std::size_t pos = 0;
  while (pos < text.size()) {
    auto nl = text.find('\n', pos);
    if (nl == std::string_view::npos)
      nl = text.size();
    lines.emplace_back(text.substr(pos, nl - pos));
    pos = nl + 1;
  }
  return lines;
}

} // namespace bletrack
