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

// Per-packet and per-second RSS averaging. Turns receiver-level reports into
// the per-anchor measurement frames consumed by the tracker.

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace bletrack {

inline constexpr double kMinRssiDbm = -120.0;
inline constexpr double kMaxRssiDbm = 0.0;
inline constexpr std::int64_t kWindowMs = 1000;
/// Two receiver reports closer than this belong to the same advertisement.
inline constexpr std::int64_t kPacketGroupingMs = 50;

struct RawReport {
  std::string anchor_id;
  int receiver_index = 0;
  std::string tag_id;
  double rssi = 0.0;
  std::int64_t timestamp_ms = 0;

  bool operator==(const RawReport&) const = default;
};

/// Throws Error(Invalid) when receiver_index is not 0/1 or rssi is outside
/// [-120, 0] dBm or not finite.
void validate_report(const RawReport& report);

/// Identifiers are 1..63 characters from [A-Za-z0-9_.:-].
bool is_valid_identifier(std::string_view id) noexcept;

struct PacketObservation {
  std::string anchor_id;
  std::string tag_id;
  double rssi = 0.0;
  std::int64_t timestamp_ms = 0;
  int receivers_used = 0;
};

struct AnchorObservation {
  std::string anchor_id;
  double mean_rssi = 0.0;
  int sample_count = 0;
  std::int64_t window_start = 0;
  std::int64_t window_end = 0;
};

struct MeasurementFrame {
  std::string tag_id;
  std::int64_t window_start = 0;
  std::vector<AnchorObservation> observations; // ascending anchor_id

  std::size_t size() const noexcept { return observations.size(); }
  bool empty() const noexcept { return observations.empty(); }
};

/// Start of the wall-clock aligned 1 s window containing `timestamp_ms`.
std::int64_t window_start_of(std::int64_t timestamp_ms) noexcept;

/// Mean over the one or two receiver readings of a single advertisement.
PacketObservation packet_mean(std::span<const RawReport> reports);

/// Mean over all packets of one anchor within [window_start, window_start+1000).
AnchorObservation window_average(std::span<const PacketObservation> packets,
                                 std::int64_t window_start);

MeasurementFrame assemble_frame(std::vector<AnchorObservation> observations,
                                std::string tag_id, std::int64_t window_start);

/// Groups receiver reports of a single tag into packets. Reports are ordered
/// canonically first, so the result does not depend on input order. Within an
/// anchor, a report pairs with the pending report from the other receiver if
/// their timestamps differ by less than kPacketGroupingMs.
///
/// If `packet_of` is given it receives, for each input report, the index of
/// the packet it was folded into.
std::vector<PacketObservation> group_packets(std::span<const RawReport> reports,
                                             std::vector<std::size_t>* packet_of = nullptr);

/// Per-anchor window averages of `packets` whose timestamps fall in the
/// window, assembled into a frame. Packets outside the window are ignored.
MeasurementFrame build_frame(std::span<const PacketObservation> packets, std::string tag_id,
                             std::int64_t window_start);

} // namespace bletrack
