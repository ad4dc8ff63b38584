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

// Deployment configuration file (JSON). Holds the anchor layout, tracker and
// detector tunables, ingest options and, optionally, a simulation scenario
// over the same anchors.
//
// {
//   "name": "fig2-corridors",
//   "anchors": [{"id": "A1", "x": 1.0, "y": 3.0, "p0": -59, "gamma": 3.5,
//                "d0": 1.0, "sigma_rss": 4.0}, ...],
//   "motion":   {"step_T": 1.0, "sigma_a": 0.5},
//   "tracker":  {"min_anchors_for_update": 1, "d_min": 0.1,
//                "init_covariance_diag": [25, 1, 25, 1], "max_coast_windows": 10},
//   "detector": {"window_s": 120, "stride_s": 10, "min_distance_m": 40,
//                "min_loiter_ratio": 4.0, "min_speed_mps": 0.2},
//   "ingest":   {"listen": "127.0.0.1:7400", "reorder_watermark_ms": 2000},
//   "scenario": {"area": [30, 15], "duration_s": 600, "advertise_hz": 10,
//                "seed": 1, "start_ms": 1700000000000, "max_range_m": null,
//                "noise": {"sigma_db": 3, "drop_probability": 0,
//                          "anchor_bias_db": {"A1": 0.0}},
//                "tags": [{"id": "T1", "waypoints": [[0, 1, 2], [10, 6, 2]]},
//                         {"id": "T2", "pacing": {"center": [8, 2],
//                          "length_m": 7, "speed_mps": 0.667}}]}
// }
//
// Every section except "anchors" is optional; omitted fields take defaults.

#include "bletrack/ekf.hpp"
#include "bletrack/simulator.hpp"
#include "bletrack/wander.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>

namespace bletrack {

struct IngestOptions {
  std::string listen = "127.0.0.1:7400";
  std::int64_t reorder_watermark_ms = 2000;
};

struct DeploymentConfig {
  std::string name;
  TrackerConfig tracker;
  DetectorParams detector;
  IngestOptions ingest;
  std::optional<Scenario> scenario;

  /// Throws Error(InvalidConfig) or Error(InvalidScenario).
  void validate() const;
};

DeploymentConfig parse_config(std::string_view json_text);
DeploymentConfig load_config(const std::filesystem::path& path);

/// Splits "host:port". Throws Error(InvalidConfig).
std::pair<std::string, int> split_host_port(std::string_view address);

} // namespace bletrack
