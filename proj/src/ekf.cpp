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
#include "bletrack/ekf.hpp"

#include "bletrack/error.hpp"

#include <cmath>
#include <numbers>
#include <set>

namespace bletrack {

namespace {

double planar_distance(Point2 a, Point2 b) { return std::hypot(a.x - b.x, a.y - b.y); }

std::int64_t step_ms(const MotionModel& m) { return std::llround(m.step_T * 1000.0); }

// Anchors in frame order; throws on ids missing from the configuration.
std::vector<AnchorConfig> anchors_for(const MeasurementFrame& frame, const TrackerConfig& config) {
  std::vector<AnchorConfig> out;
  out.reserve(frame.size());
  for (const auto& obs : frame.observations) {
    const AnchorConfig* a = config.find_anchor(obs.anchor_id);
    if (!a)
      throw Error(ErrorCode::UnknownAnchor, "anchor '" + obs.anchor_id + "' not configured");
    out.push_back(*a);
  }
  return out;
}

} // namespace

void MotionModel::validate() const {
  if (!(step_T > 0.0 && step_T <= 10.0))
    throw Error(ErrorCode::InvalidConfig, "motion.step_T must be in (0, 10] s");
  if (!(sigma_a > 0.0 && sigma_a <= 100.0))
    throw Error(ErrorCode::InvalidConfig, "motion.sigma_a must be in (0, 100] m/s^2");
}

Mat4 MotionModel::transition() const {
  Mat4 f = Mat4::Identity();
  f(kX, kVx) = step_T;
  f(kY, kVy) = step_T;
  return f;
}

Mat4 MotionModel::process_noise() const {
  const double t = step_T;
  const double q = sigma_a * sigma_a;
  Eigen::Matrix2d block;
  block << t * t * t * t / 4.0, t * t * t / 2.0,
           t * t * t / 2.0,     t * t;
  Mat4 out = Mat4::Zero();
  out.block<2, 2>(kX, kX) = q * block;
  out.block<2, 2>(kY, kY) = q * block;
  return out;
}

void AnchorConfig::validate() const {
  if (!is_valid_identifier(id))
    throw Error(ErrorCode::InvalidConfig, "anchor id '" + id + "' is not a valid identifier");
  if (!std::isfinite(position.x) || !std::isfinite(position.y) || !std::isfinite(p0))
    throw Error(ErrorCode::InvalidConfig, "anchor " + id + ": non-finite position or p0");
  if (!(gamma > 1.0 && gamma <= 6.0))
    throw Error(ErrorCode::InvalidConfig, "anchor " + id + ": gamma must be in (1, 6]");
  if (!(d0 > 0.0))
    throw Error(ErrorCode::InvalidConfig, "anchor " + id + ": d0 must be positive");
  if (!(sigma_rss > 0.0))
    throw Error(ErrorCode::InvalidConfig, "anchor " + id + ": sigma_rss must be positive");
}

void TrackerConfig::validate() const {
  if (anchors.empty())
    throw Error(ErrorCode::InvalidConfig, "no anchors configured");
  std::set<std::string_view> ids;
  for (const auto& a : anchors) {
    a.validate();
    if (!ids.insert(a.id).second)
      throw Error(ErrorCode::InvalidConfig, "duplicate anchor id " + a.id);
  }
  motion.validate();
  if (min_anchors_for_update < 1)
    throw Error(ErrorCode::InvalidConfig, "min_anchors_for_update must be >= 1");
  if (!(d_min > 0.0))
    throw Error(ErrorCode::InvalidConfig, "d_min must be positive");
  for (double v : init_covariance_diag)
    if (!(v > 0.0))
      throw Error(ErrorCode::InvalidConfig, "init_covariance_diag entries must be positive");
  if (max_coast_windows < 0)
    throw Error(ErrorCode::InvalidConfig, "max_coast_windows must be >= 0");
}

const AnchorConfig* TrackerConfig::find_anchor(std::string_view id) const noexcept {
  for (const auto& a : anchors)
    if (a.id == id)
      return &a;
  return nullptr;
}

double pathloss_rss(const AnchorConfig& anchor, Point2 position, double d_min) {
  const double d = std::max(planar_distance(position, anchor.position), d_min);
  return anchor.p0 - 10.0 * anchor.gamma * std::log10(d / anchor.d0);
}

StateEstimate predict(const StateEstimate& est, const MotionModel& motion) {
  const Mat4 f = motion.transition();
  StateEstimate out;
  out.state = f * est.state;
  out.covariance = f * est.covariance * f.transpose() + motion.process_noise();
  out.covariance = 0.5 * (out.covariance + out.covariance.transpose()).eval();
  out.timestamp_ms = est.timestamp_ms + step_ms(motion);
  return out;
}

Eigen::VectorXd expected_measurements(const StateEstimate& est,
                                      std::span<const AnchorConfig> anchors, double d_min) {
  Eigen::VectorXd h(static_cast<Eigen::Index>(anchors.size()));
  for (std::size_t i = 0; i < anchors.size(); ++i)
    h[static_cast<Eigen::Index>(i)] = pathloss_rss(anchors[i], est.position(), d_min);
  return h;
}

Eigen::MatrixXd measurement_jacobian(const StateEstimate& est,
                                     std::span<const AnchorConfig> anchors, double d_min) {
  Eigen::MatrixXd jac = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(anchors.size()), 4);
  const Point2 p = est.position();
  for (std::size_t i = 0; i < anchors.size(); ++i) {
    const auto& a = anchors[i];
    const double d = std::max(planar_distance(p, a.position), d_min);
    const double c = 10.0 * a.gamma / std::numbers::ln10;
    const auto row = static_cast<Eigen::Index>(i);
    jac(row, kX) = -c * (p.x - a.position.x) / (d * d);
    jac(row, kY) = -c * (p.y - a.position.y) / (d * d);
  }
  return jac;
}

UpdateResult update(const StateEstimate& predicted, const MeasurementFrame& frame,
                    const TrackerConfig& config) {
  const std::vector<AnchorConfig> anchors = anchors_for(frame, config);
  if (static_cast<int>(frame.size()) < config.min_anchors_for_update)
    return {predicted, UpdateStatus::TooFewAnchors};

  const auto n = static_cast<Eigen::Index>(frame.size());
  Eigen::VectorXd z(n);
  Eigen::VectorXd r_diag(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    z[i] = frame.observations[static_cast<std::size_t>(i)].mean_rssi;
    const double s = anchors[static_cast<std::size_t>(i)].sigma_rss;
    r_diag[i] = s * s;
  }

  const Eigen::VectorXd h = expected_measurements(predicted, anchors, config.d_min);
  const Eigen::MatrixXd jac = measurement_jacobian(predicted, anchors, config.d_min);
  const Mat4& p = predicted.covariance;

  Eigen::MatrixXd s = jac * p * jac.transpose();
  s.diagonal() += r_diag;
  const Eigen::LDLT<Eigen::MatrixXd> ldlt(s);
  // LDLT::rcond() treats a zero pivot as a pseudo-inverse, so check the
  // pivot ratio as well.
  const Eigen::VectorXd piv = ldlt.vectorD().cwiseAbs();
  if (ldlt.info() != Eigen::Success || !ldlt.isPositive() || ldlt.rcond() < 1e-12 ||
      !(piv.minCoeff() >= 1e-12 * piv.maxCoeff()))
    return {predicted, UpdateStatus::SingularInnovation};

  // K = P H^T S^-1, computed as (S^-1 H P)^T since P and S are symmetric.
  const Eigen::MatrixXd gain = ldlt.solve(jac * p).transpose();

  StateEstimate out;
  out.timestamp_ms = predicted.timestamp_ms;
  out.state = predicted.state + gain * (z - h);
  const Mat4 i_kh = Mat4::Identity() - gain * jac;
  out.covariance = i_kh * p;
  out.covariance = 0.5 * (out.covariance + out.covariance.transpose()).eval();
  return {out, UpdateStatus::Applied};
}

StateEstimate init_from_frame(const MeasurementFrame& frame, const TrackerConfig& config) {
  if (frame.empty())
    throw Error(ErrorCode::EmptyFrame, "cannot initialize from an empty frame");
  const std::vector<AnchorConfig> anchors = anchors_for(frame, config);

  // Weights in linear power; shift by the strongest reading to avoid underflow.
  double max_rss = frame.observations.front().mean_rssi;
  for (const auto& o : frame.observations)
    max_rss = std::max(max_rss, o.mean_rssi);

  double wsum = 0.0, x = 0.0, y = 0.0;
  for (std::size_t i = 0; i < anchors.size(); ++i) {
    const double w = std::pow(10.0, (frame.observations[i].mean_rssi - max_rss) / 10.0);
    wsum += w;
    x += w * anchors[i].position.x;
    y += w * anchors[i].position.y;
  }

  StateEstimate est;
  est.state << x / wsum, 0.0, y / wsum, 0.0;
  est.covariance = Mat4::Zero();
  for (int i = 0; i < 4; ++i)
    est.covariance(i, i) = config.init_covariance_diag[static_cast<std::size_t>(i)];
  est.timestamp_ms = frame.window_start;
  return est;
}

StepResult step(const std::optional<StateEstimate>& est, const MeasurementFrame* frame,
                const TrackerConfig& config) {
  if (!est && !frame)
    throw Error(ErrorCode::NoInput, "step needs an estimate or a frame");

  StepResult out;
  if (!est) {
    out.estimate = init_from_frame(*frame, config);
    out.initialized = true;
    out.anchors_used = static_cast<int>(frame->size());
    return out;
  }

  StateEstimate predicted = predict(*est, config.motion);
  if (!frame || frame->empty()) {
    out.estimate = std::move(predicted);
    out.coast_only = true;
    return out;
  }

  UpdateResult upd = update(predicted, *frame, config);
  out.estimate = std::move(upd.estimate);
  out.status = upd.status;
  out.coast_only = upd.status != UpdateStatus::Applied;
  out.anchors_used = out.coast_only ? 0 : static_cast<int>(frame->size());
  return out;
}

} // namespace bletrack
