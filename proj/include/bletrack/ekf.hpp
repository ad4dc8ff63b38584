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

// Extended Kalman filter over a planar constant-velocity state [x vx y vy],
// corrected with per-anchor RSS averages through a log-distance path loss
// sensor model.

#include "bletrack/measurement.hpp"

#include <Eigen/Dense>

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace bletrack {

using Vec4 = Eigen::Vector4d;
using Mat4 = Eigen::Matrix4d;

struct Point2 {
  double x = 0.0;
  double y = 0.0;
};

/// State indices, in the order [x, vx, y, vy].
enum StateIndex : int { kX = 0, kVx = 1, kY = 2, kVy = 3 };

struct StateEstimate {
  Vec4 state = Vec4::Zero();
  Mat4 covariance = Mat4::Identity();
  std::int64_t timestamp_ms = 0;

  Point2 position() const { return {state[kX], state[kY]}; }
};

/// Discrete white noise acceleration model: constant velocity between steps,
/// with acceleration treated as process noise.
struct MotionModel {
  double step_T = 1.0;  ///< seconds
  double sigma_a = 0.5; ///< m/s^2

  void validate() const;
  Mat4 transition() const;
  Mat4 process_noise() const;
};

struct AnchorConfig {
  std::string id;
  Point2 position;
  double p0 = -59.0; ///< dBm at d0
  double gamma = 3.5;
  double d0 = 1.0;        ///< m
  double sigma_rss = 4.0; ///< dB

  void validate() const;
};

struct TrackerConfig {
  std::vector<AnchorConfig> anchors;
  MotionModel motion;
  int min_anchors_for_update = 1;
  double d_min = 0.1;
  std::array<double, 4> init_covariance_diag{25.0, 1.0, 25.0, 1.0};
  /// Consecutive empty windows a track survives before it is dropped.
  int max_coast_windows = 10;

  void validate() const;
  const AnchorConfig* find_anchor(std::string_view id) const noexcept;
};

double pathloss_rss(const AnchorConfig& anchor, Point2 position, double d_min);

StateEstimate predict(const StateEstimate& est, const MotionModel& motion);

Eigen::VectorXd expected_measurements(const StateEstimate& est,
                                      std::span<const AnchorConfig> anchors, double d_min);

/// n x 4 linearization of expected_measurements at the estimate. Velocity
/// columns are always zero.
Eigen::MatrixXd measurement_jacobian(const StateEstimate& est,
                                     std::span<const AnchorConfig> anchors, double d_min);

enum class UpdateStatus {
  Applied,
  TooFewAnchors,      ///< prediction returned unchanged
  SingularInnovation, ///< prediction returned unchanged
};

struct UpdateResult {
  StateEstimate estimate;
  UpdateStatus status = UpdateStatus::Applied;
};

/// Measurement correction. Throws Error(UnknownAnchor) when the frame refers
/// to an anchor missing from the configuration.
UpdateResult update(const StateEstimate& predicted, const MeasurementFrame& frame,
                    const TrackerConfig& config);

/// Power-weighted centroid of the reporting anchors, zero velocity.
StateEstimate init_from_frame(const MeasurementFrame& frame, const TrackerConfig& config);

struct StepResult {
  StateEstimate estimate;
  bool initialized = false; ///< estimate came from init_from_frame
  bool coast_only = false;  ///< no measurement correction was applied
  UpdateStatus status = UpdateStatus::Applied;
  int anchors_used = 0;
};

/// One filter cycle. Absent estimate initializes from the frame; absent
/// frame yields a prediction only. Throws Error(NoInput) if both are absent.
StepResult step(const std::optional<StateEstimate>& est, const MeasurementFrame* frame,
                const TrackerConfig& config);

} // namespace bletrack
