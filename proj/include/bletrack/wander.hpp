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

// Trajectory statistics and detection of wandering: sustained walking that
// stays inside a small area.

#include <span>
#include <string>
#include <vector>

namespace bletrack {

struct TrackPoint {
  double t = 0.0; ///< seconds
  double x = 0.0;
  double y = 0.0;
};

struct Trajectory {
  std::string tag_id;
  std::vector<TrackPoint> points; ///< nondecreasing t
};

struct PathStats {
  double length_m = 0.0;
  double duration_s = 0.0;
  double extent_m = 0.0; ///< bounding-box diagonal
  double loiter_ratio = 0.0;
};

struct WanderEpisode {
  std::string tag_id;
  double start_t = 0.0;
  double end_t = 0.0;
  double distance_m = 0.0;
  double extent_m = 0.0;
  double mean_speed_mps = 0.0;
};

struct DetectorParams {
  double window_s = 120.0;
  double stride_s = 10.0;
  double min_distance_m = 40.0;
  double min_loiter_ratio = 4.0;
  double min_speed_mps = 0.2;

  /// Throws Error(InvalidConfig).
  void validate() const;
};

/// Floor on the extent used as a ratio denominator.
inline constexpr double kMinExtentM = 0.1;

double path_length(std::span<const TrackPoint> points);
double spatial_extent(std::span<const TrackPoint> points);
PathStats summarize(std::span<const TrackPoint> points);

inline double path_length(const Trajectory& t) { return path_length(t.points); }
inline double spatial_extent(const Trajectory& t) { return spatial_extent(t.points); }
inline PathStats summarize(const Trajectory& t) { return summarize(t.points); }

struct Detection {
  std::vector<WanderEpisode> episodes; ///< sorted, pairwise disjoint in time
  bool too_short = false;              ///< trajectory spans less than one window
};

Detection detect_episodes(const Trajectory& traj, const DetectorParams& params = {});

} // namespace bletrack
