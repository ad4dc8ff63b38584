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

// Synthetic tag trajectories and the receiver-level RSS reports an anchor
// deployment would produce for them. Output is a pure function of the
// scenario, including its seed.

#include "bletrack/ekf.hpp"
#include "bletrack/measurement.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace bletrack {

struct Waypoint {
  double t = 0.0; ///< seconds from scenario start
  double x = 0.0;
  double y = 0.0;
};

struct TrajectoryScript {
  std::string tag_id;
  std::vector<Waypoint> waypoints; ///< strictly increasing t

  void validate() const;
  double scripted_length() const;
};

struct NoiseModel {
  double sigma_db = 0.0;
  std::map<std::string, double> anchor_bias_db;
  double drop_probability = 0.0;
};

struct Scenario {
  std::string name;
  double width = 0.0;
  double height = 0.0;
  std::vector<AnchorConfig> anchors;
  std::vector<TrajectoryScript> tags;
  NoiseModel noise;
  double advertise_hz = 10.0;
  double duration_s = 0.0;
  std::uint64_t seed = 0;
  std::int64_t start_ms = 1'700'000'000'000;
  double d_min = 0.1;
  std::optional<double> max_range_m; ///< unset: every anchor hears every packet

  /// Throws Error(InvalidScenario).
  void validate() const;
  std::int64_t advertisement_count() const;
};

struct GroundTruthSample {
  std::string tag_id;
  double t = 0.0; ///< seconds from scenario start
  double x = 0.0;
  double y = 0.0;
};

struct Emission {
  std::vector<RawReport> reports;
  std::vector<GroundTruthSample> truth;
};

/// Piecewise-linear interpolation, held constant outside the waypoint span.
Point2 position_at(const TrajectoryScript& script, double t);

Emission emit(const Scenario& scenario);

/// Back-and-forth walk along a horizontal segment of `path_length_m`
/// centered at `center`, starting from its left end.
/// Turn times of pacing scripts fall on this grid (ticks per second).
inline constexpr double kPacingTicksPerS = 10.0;

TrajectoryScript make_pacing_script(std::string tag_id, Point2 center, double path_length_m,
                                    double speed_mps, double duration_s);

/// Counter-based generator: each (seed, tag, anchor, receiver, packet) key
/// owns an independent stream, so emission order never changes the draws.
class KeyedRandom {
public:
  KeyedRandom(std::uint64_t seed, std::string_view tag_id, std::string_view anchor_id,
              int receiver_index, std::int64_t packet_index) noexcept;

  std::uint64_t next_u64() noexcept;
  /// Uniform in [0, 1).
  double uniform() noexcept;
  /// Standard normal via Box-Muller.
  double normal() noexcept;

private:
  std::uint64_t state_;
};

} // namespace bletrack
