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
#include "bletrack/pipeline.hpp"

#include "bletrack/error.hpp"
#include "bletrack/wire.hpp"

#include <algorithm>
#include <cmath>
#include <tuple>

namespace bletrack {

namespace {

// Division by the integer scale yields the double nearest to the decimal.
double round_to(double v, double scale) {
  const double r = std::round(v * scale) / scale;
  return r == 0.0 ? 0.0 : r;
}

} // namespace

TrajectoryLogRecord make_record(std::string_view tag_id, std::int64_t t_ms, const StepResult& s) {
  const Vec4& x = s.estimate.state;
  TrajectoryLogRecord rec;
  rec.tag_id = std::string(tag_id);
  rec.t_ms = t_ms;
  rec.x_m = round_to(x[kX], 1000.0);
  rec.y_m = round_to(x[kY], 1000.0);
  rec.vx_mps = round_to(x[kVx], 1000.0);
  rec.vy_mps = round_to(x[kVy], 1000.0);
  rec.p_trace = round_to(s.estimate.covariance.trace(), 10000.0);
  rec.n_anchors_used = s.anchors_used;
  rec.coast = s.coast_only;
  return rec;
}

TagPipeline::TagPipeline(std::string tag_id, const TrackerConfig& config)
    : tag_id_(std::move(tag_id)), config_(&config) {}

void TagPipeline::add(RawReport report) {
  buckets_[window_start_of(report.timestamp_ms)].push_back(std::move(report));
}

std::size_t TagPipeline::buffered() const noexcept {
  std::size_t n = 0;
  for (const auto& [w, reports] : buckets_)
    n += reports.size();
  return n;
}

void TagPipeline::close_through(std::int64_t last_window, std::vector<TrajectoryLogRecord>& out) {
  for (;;) {
    const std::optional<std::int64_t> next_data =
        buckets_.empty() ? std::nullopt : std::optional(buckets_.begin()->first);
    if (est_) {
      const std::int64_t w = last_window_ + kWindowMs;
      if (w > last_window)
        return;
      if (next_data == w) {
        process_window(w, out);
      } else if (coast_count_ < config_->max_coast_windows) {
        coast_window(w, out);
      } else {
        est_.reset(); // track lost; reinitialize at the next data window
      }
    } else {
      if (!next_data || *next_data > last_window)
        return;
      process_window(*next_data, out);
    }
  }
}

void TagPipeline::process_window(std::int64_t window, std::vector<TrajectoryLogRecord>& out) {
  // The window's own reports plus next-window reports that may complete a
  // packet begun before the boundary.
  std::vector<RawReport> reports = std::move(buckets_.at(window));
  buckets_.erase(window);
  const std::size_t own = reports.size();
  const std::int64_t boundary = window + kWindowMs;
  auto next = buckets_.find(boundary);
  if (next != buckets_.end())
    for (const auto& r : next->second)
      if (r.timestamp_ms < boundary + kPacketGroupingMs)
        reports.push_back(r);

  std::vector<std::size_t> packet_of;
  const std::vector<PacketObservation> packets = group_packets(reports, &packet_of);

  if (next != buckets_.end()) {
    std::vector<RawReport> keep;
    std::size_t idx = own;
    for (auto& r : next->second) {
      const bool candidate = r.timestamp_ms < boundary + kPacketGroupingMs;
      const bool consumed = candidate && packets[packet_of[idx]].timestamp_ms < boundary;
      if (candidate)
        ++idx;
      if (!consumed)
        keep.push_back(std::move(r));
    }
    if (keep.empty())
      buckets_.erase(next);
    else
      next->second = std::move(keep);
  }

  const MeasurementFrame frame = build_frame(packets, tag_id_, window);
  StepResult res = step(est_, &frame, *config_);
  res.estimate.timestamp_ms = window;
  out.push_back(make_record(tag_id_, window, res));
  est_ = std::move(res.estimate);
  last_window_ = window;
  coast_count_ = 0;
}

void TagPipeline::coast_window(std::int64_t window, std::vector<TrajectoryLogRecord>& out) {
  StepResult res = step(est_, nullptr, *config_);
  res.estimate.timestamp_ms = window;
  out.push_back(make_record(tag_id_, window, res));
  est_ = std::move(res.estimate);
  last_window_ = window;
  ++coast_count_;
}

Router::Router(TrackerConfig config, RouterOptions options)
    : config_(std::move(config)), options_(options) {
  config_.validate();
}

std::optional<std::int64_t> Router::watermark() const noexcept {
  if (!max_ts_)
    return std::nullopt;
  return *max_ts_ - options_.reorder_watermark_ms;
}

PushResult Router::push(RawReport report) {
  validate_report(report);
  if (!config_.find_anchor(report.anchor_id)) {
    ++stats_.unknown_anchor;
    return PushResult::UnknownAnchor;
  }
  if (options_.drop_late) {
    const auto wm = watermark();
    if (wm && report.timestamp_ms < *wm) {
      ++stats_.late_dropped;
      return PushResult::Late;
    }
  }
  max_ts_ = max_ts_ ? std::max(*max_ts_, report.timestamp_ms) : report.timestamp_ms;
  auto it = tags_.find(report.tag_id);
  if (it == tags_.end())
    it = tags_.try_emplace(report.tag_id, report.tag_id, config_).first;
  it->second.add(std::move(report));
  ++stats_.accepted;
  return PushResult::Accepted;
}

std::vector<TrajectoryLogRecord> Router::poll() {
  const auto wm = watermark();
  if (!wm)
    return {};
  // A window is complete once no report that could join one of its packets
  // can still be accepted.
  const std::int64_t last = window_start_of(*wm - kWindowMs - kPacketGroupingMs);
  return close_through(last);
}

std::vector<TrajectoryLogRecord> Router::flush() {
  if (!max_ts_)
    return {};
  return close_through(window_start_of(*max_ts_));
}

std::vector<TrajectoryLogRecord> Router::close_through(std::int64_t last_window) {
  std::vector<TrajectoryLogRecord> out;
  if (closed_through_ && last_window <= *closed_through_)
    return out;
  for (auto& [tag, pipeline] : tags_)
    pipeline.close_through(last_window, out);
  closed_through_ = last_window;
  std::stable_sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
    return std::tie(a.t_ms, a.tag_id) < std::tie(b.t_ms, b.tag_id);
  });
  stats_.records += out.size();
  return out;
}

OfflineResult run_offline(std::span<const std::string> lines, const TrackerConfig& config) {
  OfflineResult res;
  Router router(config, RouterOptions{0, /*drop_late=*/false});
  for (const auto& line : lines) {
    if (line.empty() || line == "\r")
      continue;
    ++res.lines;
    try {
      router.push(parse_report(line));
    } catch (const Error&) {
      ++res.parse_errors;
    }
  }
  res.records = router.flush();
  res.router = router.stats();
  return res;
}

std::vector<TrajectoryLogRecord> track_reports(std::span<const RawReport> reports,
                                               const TrackerConfig& config) {
  Router router(config, RouterOptions{0, /*drop_late=*/false});
  for (const auto& r : reports)
    router.push(r);
  return router.flush();
}

std::vector<Trajectory> trajectories_from_log(std::span<const TrajectoryLogRecord> records) {
  std::map<std::string, Trajectory> by_tag;
  for (const auto& r : records) {
    auto& traj = by_tag[r.tag_id];
    traj.tag_id = r.tag_id;
    traj.points.push_back({static_cast<double>(r.t_ms) / 1000.0, r.x_m, r.y_m});
  }
  std::vector<Trajectory> out;
  for (auto& [tag, traj] : by_tag) {
    std::stable_sort(traj.points.begin(), traj.points.end(),
                     [](const auto& a, const auto& b) { return a.t < b.t; });
    out.push_back(std::move(traj));
  }
  return out;
}

} // namespace bletrack
