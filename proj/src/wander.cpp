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
#include "bletrack/wander.hpp"

#include "bletrack/error.hpp"

#include <algorithm>
#include <cmath>

namespace bletrack {

void DetectorParams::validate() const {
  if (!(window_s > 0.0))
    throw Error(ErrorCode::InvalidConfig, "detector.window_s must be positive");
  if (!(stride_s > 0.0))
    throw Error(ErrorCode::InvalidConfig, "detector.stride_s must be positive");
  if (!(min_distance_m >= 0.0) || !(min_loiter_ratio >= 0.0) || !(min_speed_mps >= 0.0))
    throw Error(ErrorCode::InvalidConfig, "detector thresholds must be non-negative");
}

double path_length(std::span<const TrackPoint> points) {
  double len = 0.0;
  for (std::size_t i = 1; i < points.size(); ++i)
    len += std::hypot(points[i].x - points[i - 1].x, points[i].y - points[i - 1].y);
  return len;
}

double spatial_extent(std::span<const TrackPoint> points) {
  if (points.empty())
    return 0.0;
  auto [xmin, xmax] = std::minmax_element(points.begin(), points.end(),
                                          [](const auto& a, const auto& b) { return a.x < b.x; });
  auto [ymin, ymax] = std::minmax_element(points.begin(), points.end(),
                                          [](const auto& a, const auto& b) { return a.y < b.y; });
  return std::hypot(xmax->x - xmin->x, ymax->y - ymin->y);
}

PathStats summarize(std::span<const TrackPoint> points) {
  PathStats s;
  if (points.empty())
    return s;
  s.length_m = path_length(points);
  s.duration_s = points.back().t - points.front().t;
  s.extent_m = spatial_extent(points);
  s.loiter_ratio = s.length_m / std::max(s.extent_m, kMinExtentM);
  return s;
}

namespace {

std::span<const TrackPoint> slice(const std::vector<TrackPoint>& pts, double t0, double t1) {
  auto lo = std::lower_bound(pts.begin(), pts.end(), t0,
                             [](const TrackPoint& p, double v) { return p.t < v; });
  auto hi = std::upper_bound(pts.begin(), pts.end(), t1,
                             [](double v, const TrackPoint& p) { return v < p.t; });
  return {lo, hi};
}

struct Span {
  double start;
  double end;
};

} // namespace

Detection detect_episodes(const Trajectory& traj, const DetectorParams& params) {
  params.validate();
  Detection out;
  const auto& pts = traj.points;
  if (pts.empty() || pts.back().t - pts.front().t < params.window_s) {
    out.too_short = true;
    return out;
  }

  const double t_first = pts.front().t;
  const double t_last = pts.back().t;

  std::vector<double> starts;
  for (std::size_t i = 0;; ++i) {
    const double s = t_first + static_cast<double>(i) * params.stride_s;
    if (s + params.window_s > t_last)
      break;
    starts.push_back(s);
  }
  // Align one extra window to the end so the tail is not skipped.
  if (starts.back() + params.window_s < t_last)
    starts.push_back(t_last - params.window_s);

  std::vector<Span> positive;
  for (double s : starts) {
    const auto window = slice(pts, s, s + params.window_s);
    const double len = path_length(window);
    const double ratio = len / std::max(spatial_extent(window), kMinExtentM);
    const double speed = len / params.window_s;
    if (len >= params.min_distance_m && ratio >= params.min_loiter_ratio &&
        speed >= params.min_speed_mps)
      positive.push_back({s, s + params.window_s});
  }

  std::vector<Span> merged;
  for (const auto& w : positive) {
    if (!merged.empty() && w.start <= merged.back().end)
      merged.back().end = std::max(merged.back().end, w.end);
    else
      merged.push_back(w);
  }

  for (const auto& m : merged) {
    const auto window = slice(pts, m.start, m.end);
    WanderEpisode ep;
    ep.tag_id = traj.tag_id;
    ep.start_t = window.front().t;
    ep.end_t = window.back().t;
    ep.distance_m = path_length(window);
    ep.extent_m = spatial_extent(window);
    const double dur = ep.end_t - ep.start_t;
    ep.mean_speed_mps = dur > 0.0 ? ep.distance_m / dur : 0.0;
    out.episodes.push_back(std::move(ep));
  }
  return out;
}

} // namespace bletrack
