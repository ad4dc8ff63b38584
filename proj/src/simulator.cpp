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
#include "bletrack/simulator.hpp"

#include "bletrack/error.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>

namespace bletrack {

namespace {

std::uint64_t splitmix64(std::uint64_t& state) noexcept {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::uint64_t fnv1a(std::string_view s) noexcept {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::uint64_t mix(std::uint64_t acc, std::uint64_t v) noexcept {
  std::uint64_t s = acc ^ v;
  return splitmix64(s);
}

} // namespace

KeyedRandom::KeyedRandom(std::uint64_t seed, std::string_view tag_id, std::string_view anchor_id,
                         int receiver_index, std::int64_t packet_index) noexcept {
  std::uint64_t h = mix(0x6a09e667f3bcc908ULL, seed);
  h = mix(h, fnv1a(tag_id));
  h = mix(h, fnv1a(anchor_id));
  h = mix(h, static_cast<std::uint64_t>(receiver_index));
  h = mix(h, static_cast<std::uint64_t>(packet_index));
  state_ = h;
}

std::uint64_t KeyedRandom::next_u64() noexcept { return splitmix64(state_); }

double KeyedRandom::uniform() noexcept {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double KeyedRandom::normal() noexcept {
  const double u1 = 1.0 - uniform(); // (0, 1]
  const double u2 = uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

void TrajectoryScript::validate() const {
  if (!is_valid_identifier(tag_id))
    throw Error(ErrorCode::InvalidScenario, "tag id '" + tag_id + "' is not a valid identifier");
  if (waypoints.empty())
    throw Error(ErrorCode::InvalidScenario, "tag " + tag_id + " has no waypoints");
  for (std::size_t i = 0; i < waypoints.size(); ++i) {
    const auto& w = waypoints[i];
    if (!std::isfinite(w.t) || !std::isfinite(w.x) || !std::isfinite(w.y))
      throw Error(ErrorCode::InvalidScenario, "tag " + tag_id + ": non-finite waypoint");
    if (i > 0 && !(w.t > waypoints[i - 1].t))
      throw Error(ErrorCode::InvalidScenario, "tag " + tag_id + ": waypoint times must increase");
  }
}

double TrajectoryScript::scripted_length() const {
  double len = 0.0;
  for (std::size_t i = 1; i < waypoints.size(); ++i)
    len += std::hypot(waypoints[i].x - waypoints[i - 1].x, waypoints[i].y - waypoints[i - 1].y);
  return len;
}

void Scenario::validate() const {
  auto fail = [&](const std::string& why) {
    throw Error(ErrorCode::InvalidScenario, "scenario '" + name + "': " + why);
  };
  if (!(width > 0.0 && height > 0.0))
    fail("area must be positive");
  if (!(advertise_hz > 0.0))
    fail("advertise_hz must be positive");
  if (!(duration_s > 0.0))
    fail("duration must be positive");
  if (anchors.empty())
    fail("no anchors");
  if (!(d_min > 0.0))
    fail("d_min must be positive");
  if (!(noise.sigma_db >= 0.0))
    fail("noise.sigma_db must be >= 0");
  if (!(noise.drop_probability >= 0.0 && noise.drop_probability < 1.0))
    fail("noise.drop_probability must be in [0, 1)");
  if (max_range_m && !(*max_range_m > 0.0))
    fail("max_range_m must be positive");

  std::set<std::string_view> ids;
  for (const auto& a : anchors) {
    try {
      a.validate();
    } catch (const Error& e) {
      fail(e.what());
    }
    if (!ids.insert(a.id).second)
      fail("duplicate anchor " + a.id);
  }
  for (const auto& [id, bias] : noise.anchor_bias_db) {
    if (!ids.contains(id))
      fail("bias given for unknown anchor " + id);
    if (!std::isfinite(bias))
      fail("non-finite bias for anchor " + id);
  }
  std::set<std::string_view> tag_ids;
  for (const auto& tag : tags) {
    tag.validate();
    if (!tag_ids.insert(tag.tag_id).second)
      fail("duplicate tag " + tag.tag_id);
    for (const auto& w : tag.waypoints)
      if (w.x < 0.0 || w.x > width || w.y < 0.0 || w.y > height)
        fail("tag " + tag.tag_id + " has a waypoint outside the area");
  }
}

std::int64_t Scenario::advertisement_count() const {
  // Tolerance guards products such as 0.1 * 10 landing just below an integer.
  return static_cast<std::int64_t>(std::floor(duration_s * advertise_hz + 1e-9));
}

Point2 position_at(const TrajectoryScript& script, double t) {
  const auto& wp = script.waypoints;
  if (t <= wp.front().t)
    return {wp.front().x, wp.front().y};
  if (t >= wp.back().t)
    return {wp.back().x, wp.back().y};
  auto hi = std::upper_bound(wp.begin(), wp.end(), t,
                             [](double v, const Waypoint& w) { return v < w.t; });
  auto lo = std::prev(hi);
  const double u = (t - lo->t) / (hi->t - lo->t);
  return {lo->x + u * (hi->x - lo->x), lo->y + u * (hi->y - lo->y)};
}

Emission emit(const Scenario& sc) {
  sc.validate();

  Emission out;
  const std::int64_t packets = sc.advertisement_count();
  out.reports.reserve(static_cast<std::size_t>(packets) * sc.tags.size() * sc.anchors.size() * 2);

  std::vector<double> bias(sc.anchors.size(), 0.0);
  for (std::size_t i = 0; i < sc.anchors.size(); ++i)
    if (auto it = sc.noise.anchor_bias_db.find(sc.anchors[i].id); it != sc.noise.anchor_bias_db.end())
      bias[i] = it->second;

  for (std::int64_t k = 0; k < packets; ++k) {
    const double t = static_cast<double>(k) / sc.advertise_hz;
    const std::int64_t ts =
        sc.start_ms + std::llround(static_cast<double>(k) * 1000.0 / sc.advertise_hz);
    for (const auto& tag : sc.tags) {
      const Point2 truth = position_at(tag, t);
      for (std::size_t ai = 0; ai < sc.anchors.size(); ++ai) {
        const AnchorConfig& anchor = sc.anchors[ai];
        if (sc.max_range_m &&
            std::hypot(truth.x - anchor.position.x, truth.y - anchor.position.y) > *sc.max_range_m)
          continue;
        const double mean_rss = pathloss_rss(anchor, truth, sc.d_min) + bias[ai];
        for (int rx = 0; rx < 2; ++rx) {
          KeyedRandom rng(sc.seed, tag.tag_id, anchor.id, rx, k);
          const double drop_draw = rng.uniform();
          const double noise = rng.normal();
          if (drop_draw < sc.noise.drop_probability)
            continue;
          const double rssi =
              std::clamp(mean_rss + sc.noise.sigma_db * noise, kMinRssiDbm, kMaxRssiDbm);
          out.reports.push_back(RawReport{anchor.id, rx, tag.tag_id, rssi, ts});
        }
      }
    }
  }

  const auto seconds = static_cast<std::int64_t>(std::ceil(sc.duration_s - 1e-9));
  for (std::int64_t s = 0; s < seconds; ++s) {
    for (const auto& tag : sc.tags) {
      const Point2 p = position_at(tag, static_cast<double>(s));
      out.truth.push_back(GroundTruthSample{tag.tag_id, static_cast<double>(s), p.x, p.y});
    }
  }
  return out;
}

TrajectoryScript make_pacing_script(std::string tag_id, Point2 center, double path_length_m,
                                    double speed_mps, double duration_s) {
  if (!(path_length_m > 0.0) || !(speed_mps > 0.0) || !(duration_s > 0.0))
    throw Error(ErrorCode::InvalidScenario, "pacing needs positive length, speed and duration");

  const double left = center.x - path_length_m / 2.0;
  const double right = center.x + path_length_m / 2.0;
  // Turns land on the 0.1 s advertising grid so a 10 Hz sampler never cuts
  // a corner; the leg speed moves by at most half a tick per leg.
  const std::int64_t leg_ticks =
      std::max<std::int64_t>(1, std::llround(path_length_m / speed_mps * kPacingTicksPerS));
  const double leg = static_cast<double>(leg_ticks) / kPacingTicksPerS;
  const double leg_speed = path_length_m / leg;

  TrajectoryScript script{std::move(tag_id), {}};
  script.waypoints.push_back({0.0, left, center.y});
  bool at_left = true;
  double t = 0.0;
  for (std::int64_t n = 1;; ++n) {
    const double next = static_cast<double>(n * leg_ticks) / kPacingTicksPerS;
    if (next >= duration_s * (1.0 - 1e-12))
      break;
    t = next;
    at_left = !at_left;
    script.waypoints.push_back({t, at_left ? left : right, center.y});
  }
  // Final (possibly partial) leg ends exactly at duration_s.
  const double remaining = duration_s - t;
  const double dir = at_left ? 1.0 : -1.0;
  const double x_end =
      (at_left ? left : right) + dir * std::min(remaining * leg_speed, path_length_m);
  if (remaining > leg * 1e-9)
    script.waypoints.push_back({duration_s, x_end, center.y});
  else
    script.waypoints.back().t = duration_s;
  return script;
}

} // namespace bletrack
