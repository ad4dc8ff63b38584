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
#include "bletrack/measurement.hpp"

#include "bletrack/error.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <optional>
#include <tuple>

namespace bletrack {

namespace {

// Summation over sorted values keeps the result independent of input order.
double order_free_mean(std::vector<double> values) {
  std::sort(values.begin(), values.end());
  const double sum = std::accumulate(values.begin(), values.end(), 0.0);
  return sum / static_cast<double>(values.size());
}

} // namespace

void validate_report(const RawReport& r) {
  if (r.receiver_index != 0 && r.receiver_index != 1)
    throw Error(ErrorCode::Invalid, "receiver_index must be 0 or 1, got " +
                                        std::to_string(r.receiver_index));
  if (!std::isfinite(r.rssi) || r.rssi < kMinRssiDbm || r.rssi > kMaxRssiDbm)
    throw Error(ErrorCode::Invalid, "rssi outside [-120, 0] dBm");
  if (!is_valid_identifier(r.anchor_id) || !is_valid_identifier(r.tag_id))
    throw Error(ErrorCode::Invalid, "bad anchor or tag identifier");
}

bool is_valid_identifier(std::string_view id) noexcept {
  if (id.empty() || id.size() > 63)
    return false;
  return std::all_of(id.begin(), id.end(), [](char c) {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') ||
           c == '_' || c == '.' || c == ':' || c == '-';
  });
}

std::int64_t window_start_of(std::int64_t timestamp_ms) noexcept {
  std::int64_t rem = timestamp_ms % kWindowMs;
  if (rem < 0)
    rem += kWindowMs;
  return timestamp_ms - rem;
}

PacketObservation packet_mean(std::span<const RawReport> reports) {
  if (reports.empty())
    throw Error(ErrorCode::EmptyInput, "packet has no receiver reports");
  if (reports.size() > 2)
    throw Error(ErrorCode::Invalid, "a packet carries at most two receiver reports");

  const RawReport& first = reports.front();
  PacketObservation out{first.anchor_id, first.tag_id, 0.0, first.timestamp_ms,
                        static_cast<int>(reports.size())};
  double sum = 0.0;
  for (const auto& r : reports) {
    if (r.anchor_id != first.anchor_id || r.tag_id != first.tag_id)
      throw Error(ErrorCode::MixedIdentity, "reports from different anchor/tag pairs");
    if (std::llabs(r.timestamp_ms - first.timestamp_ms) >= kPacketGroupingMs)
      throw Error(ErrorCode::Invalid, "receiver timestamps too far apart for one packet");
    out.timestamp_ms = std::min(out.timestamp_ms, r.timestamp_ms);
    sum += r.rssi;
  }
  out.rssi = sum / static_cast<double>(reports.size());
  return out;
}

AnchorObservation window_average(std::span<const PacketObservation> packets,
                                 std::int64_t window_start) {
  if (packets.empty())
    throw Error(ErrorCode::EmptyWindow, "no packets in window");

  const auto& first = packets.front();
  std::vector<double> values;
  values.reserve(packets.size());
  for (const auto& p : packets) {
    if (p.anchor_id != first.anchor_id || p.tag_id != first.tag_id)
      throw Error(ErrorCode::MixedIdentity, "packets from different anchor/tag pairs");
    if (p.timestamp_ms < window_start || p.timestamp_ms >= window_start + kWindowMs)
      throw Error(ErrorCode::Invalid, "packet timestamp outside window");
    values.push_back(p.rssi);
  }
  return AnchorObservation{first.anchor_id, order_free_mean(std::move(values)),
                           static_cast<int>(packets.size()), window_start,
                           window_start + kWindowMs};
}

MeasurementFrame assemble_frame(std::vector<AnchorObservation> observations, std::string tag_id,
                                std::int64_t window_start) {
  std::sort(observations.begin(), observations.end(),
            [](const auto& a, const auto& b) { return a.anchor_id < b.anchor_id; });
  auto dup = std::adjacent_find(observations.begin(), observations.end(),
                                [](const auto& a, const auto& b) { return a.anchor_id == b.anchor_id; });
  if (dup != observations.end())
    throw Error(ErrorCode::DuplicateAnchor, "anchor " + dup->anchor_id + " appears twice");
  return MeasurementFrame{std::move(tag_id), window_start, std::move(observations)};
}

std::vector<PacketObservation> group_packets(std::span<const RawReport> reports,
                                             std::vector<std::size_t>* packet_of) {
  std::vector<std::size_t> order(reports.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) {
    const RawReport& a = reports[i];
    const RawReport& b = reports[j];
    return std::tie(a.anchor_id, a.tag_id, a.timestamp_ms, a.receiver_index, a.rssi, i) <
           std::tie(b.anchor_id, b.tag_id, b.timestamp_ms, b.receiver_index, b.rssi, j);
  });
  if (packet_of)
    packet_of->assign(reports.size(), 0);

  std::vector<PacketObservation> packets;
  auto close = [&](std::span<const std::size_t> members) {
    std::vector<RawReport> group;
    for (std::size_t m : members) {
      group.push_back(reports[m]);
      if (packet_of)
        (*packet_of)[m] = packets.size();
    }
    packets.push_back(packet_mean(group));
  };

  std::optional<std::size_t> pending;
  for (std::size_t idx : order) {
    const RawReport& r = reports[idx];
    if (pending) {
      const RawReport& p = reports[*pending];
      if (p.anchor_id == r.anchor_id && p.tag_id == r.tag_id &&
          p.receiver_index != r.receiver_index &&
          r.timestamp_ms - p.timestamp_ms < kPacketGroupingMs) {
        const std::size_t pair[] = {*pending, idx};
        close(pair);
        pending.reset();
        continue;
      }
      close(std::span(&*pending, 1));
    }
    pending = idx;
  }
  if (pending)
    close(std::span(&*pending, 1));
  return packets;
}

MeasurementFrame build_frame(std::span<const PacketObservation> packets, std::string tag_id,
                             std::int64_t window_start) {
  std::map<std::string, std::vector<PacketObservation>> by_anchor;
  for (const auto& p : packets) {
    if (p.timestamp_ms >= window_start && p.timestamp_ms < window_start + kWindowMs)
      by_anchor[p.anchor_id].push_back(p);
  }
  std::vector<AnchorObservation> observations;
  observations.reserve(by_anchor.size());
  for (const auto& [anchor, group] : by_anchor)
    observations.push_back(window_average(group, window_start));
  return assemble_frame(std::move(observations), std::move(tag_id), window_start);
}

} // namespace bletrack
