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
#include "bletrack/error.hpp"
#include "bletrack/measurement.hpp"

#include <catch_amalgamated.hpp>

#include <algorithm>
#include <random>

using namespace bletrack;
using Catch::Approx;

namespace {

RawReport rep(std::string anchor, int rx, double rssi, std::int64_t ts, std::string tag = "T1") {
  return RawReport{std::move(anchor), rx, std::move(tag), rssi, ts};
}

PacketObservation pkt(std::string anchor, double rssi, std::int64_t ts) {
  return PacketObservation{std::move(anchor), "T1", rssi, ts, 2};
}

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected bletrack::Error");
  return ErrorCode::Network;
}

} // namespace

TEST_CASE("packet_mean averages receivers in dBm", "[measurement]") {
  const RawReport both[] = {rep("A1", 0, -60, 1000), rep("A1", 1, -70, 1003)};
  const auto p = packet_mean(both);
  CHECK(p.rssi == -65.0);
  CHECK(p.receivers_used == 2);
  CHECK(p.timestamp_ms == 1000);

  const RawReport one[] = {rep("A1", 0, -60, 1000)};
  const auto q = packet_mean(one);
  CHECK(q.rssi == -60.0);
  CHECK(q.receivers_used == 1);

  CHECK(code_of([] { packet_mean({}); }) == ErrorCode::EmptyInput);
}

TEST_CASE("packet_mean rejects mixed identities", "[measurement]") {
  const RawReport anchors[] = {rep("A1", 0, -60, 1000), rep("A2", 1, -70, 1000)};
  CHECK(code_of([&] { packet_mean(anchors); }) == ErrorCode::MixedIdentity);
  const RawReport tags[] = {rep("A1", 0, -60, 1000, "T1"), rep("A1", 1, -70, 1000, "T2")};
  CHECK(code_of([&] { packet_mean(tags); }) == ErrorCode::MixedIdentity);
  const RawReport apart[] = {rep("A1", 0, -60, 1000), rep("A1", 1, -70, 1050)};
  CHECK(code_of([&] { packet_mean(apart); }) == ErrorCode::Invalid);
}

TEST_CASE("window_average", "[measurement]") {
  std::vector<PacketObservation> constant(10, pkt("A1", -70, 5100));
  const auto c = window_average(constant, 5000);
  CHECK(c.mean_rssi == -70.0);
  CHECK(c.sample_count == 10);
  CHECK(c.window_end - c.window_start == 1000);

  // Oracle: direct summation of -60..-69 over 10 values.
  std::vector<PacketObservation> ramp;
  double oracle = 0.0;
  for (int i = 0; i < 10; ++i) {
    ramp.push_back(pkt("A1", -60.0 - i, 5000 + 100 * i));
    oracle += -60.0 - i;
  }
  oracle /= 10.0;
  CHECK(window_average(ramp, 5000).mean_rssi == Approx(oracle).epsilon(1e-15));
  CHECK(oracle == -64.5);

  CHECK(code_of([] { window_average({}, 0); }) == ErrorCode::EmptyWindow);
  std::vector<PacketObservation> outside{pkt("A1", -70, 6000)};
  CHECK(code_of([&] { window_average(outside, 5000); }) == ErrorCode::Invalid);
}

TEST_CASE("assemble_frame sorts and rejects duplicates", "[measurement]") {
  std::vector<AnchorObservation> obs;
  for (const char* id : {"A7", "A3", "A1", "A5", "A2", "A6", "A4"})
    obs.push_back(AnchorObservation{id, -70, 10, 0, 1000});
  const auto frame = assemble_frame(obs, "T1", 0);
  REQUIRE(frame.size() == 7);
  CHECK(std::is_sorted(frame.observations.begin(), frame.observations.end(),
                       [](const auto& a, const auto& b) { return a.anchor_id < b.anchor_id; }));

  const auto single = assemble_frame({AnchorObservation{"A4", -70, 1, 0, 1000}}, "T1", 0);
  CHECK(single.size() == 1);

  std::vector<AnchorObservation> dup{{"A1", -70, 1, 0, 1000}, {"A1", -71, 1, 0, 1000}};
  CHECK(code_of([&] { assemble_frame(dup, "T1", 0); }) == ErrorCode::DuplicateAnchor);
}

TEST_CASE("averaging properties over random windows", "[measurement][property]") {
  std::mt19937_64 rng(12345);
  std::uniform_real_distribution<double> rssi(-100.0, -40.0);
  std::uniform_int_distribution<int> count(1, 25);

  for (int trial = 0; trial < 300; ++trial) {
    const std::int64_t w = 1'700'000'000'000 + 1000 * trial;
    const int n = count(rng);

    // Every packet heard by both receivers: two-stage mean equals flat mean.
    std::vector<RawReport> reports;
    double flat = 0.0;
    for (int k = 0; k < n; ++k) {
      const std::int64_t ts = w + 1000 * k / n;
      for (int rx = 0; rx < 2; ++rx) {
        reports.push_back(rep("A1", rx, rssi(rng), ts));
        flat += reports.back().rssi;
      }
    }
    flat /= static_cast<double>(reports.size());
    auto packets = group_packets(reports);
    REQUIRE(packets.size() == static_cast<std::size_t>(n));
    const auto two_stage = window_average(packets, w);
    CHECK(two_stage.mean_rssi == Approx(flat).margin(1e-12));

    // Permutation invariance, exact.
    auto shuffled = reports;
    std::shuffle(shuffled.begin(), shuffled.end(), rng);
    auto packets2 = group_packets(shuffled);
    std::shuffle(packets2.begin(), packets2.end(), rng);
    CHECK(window_average(packets2, w).mean_rssi == two_stage.mean_rssi);

    // Constant input is a fixed point.
    const double v = rssi(rng);
    std::vector<PacketObservation> same(static_cast<std::size_t>(n), pkt("A1", v, w));
    CHECK(std::abs(window_average(same, w).mean_rssi - v) <= 1e-12);
  }
}

TEST_CASE("frame construction is independent of input order", "[measurement][property]") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> rssi(-95.0, -45.0);
  std::vector<RawReport> reports;
  for (int a = 1; a <= 7; ++a)
    for (int k = 0; k < 10; ++k)
      for (int rx = 0; rx < 2; ++rx)
        if (rng() % 5 != 0)
          reports.push_back(rep("A" + std::to_string(a), rx, rssi(rng), 4000 + 100 * k + rx));

  auto reference = build_frame(group_packets(reports), "T1", 4000);
  for (int i = 0; i < 20; ++i) {
    std::shuffle(reports.begin(), reports.end(), rng);
    auto frame = build_frame(group_packets(reports), "T1", 4000);
    REQUIRE(frame.size() == reference.size());
    for (std::size_t k = 0; k < frame.size(); ++k) {
      CHECK(frame.observations[k].anchor_id == reference.observations[k].anchor_id);
      CHECK(frame.observations[k].mean_rssi == reference.observations[k].mean_rssi);
      CHECK(frame.observations[k].sample_count == reference.observations[k].sample_count);
    }
  }
}

TEST_CASE("group_packets pairing rules", "[measurement]") {
  SECTION("receivers within 50 ms pair") {
    auto p = group_packets(std::vector{rep("A1", 0, -60, 1000), rep("A1", 1, -62, 1049)});
    REQUIRE(p.size() == 1);
    CHECK(p[0].receivers_used == 2);
    CHECK(p[0].rssi == -61.0);
  }
  SECTION("50 ms apart are separate packets") {
    auto p = group_packets(std::vector{rep("A1", 0, -60, 1000), rep("A1", 1, -62, 1050)});
    CHECK(p.size() == 2);
  }
  SECTION("same receiver never pairs") {
    auto p = group_packets(std::vector{rep("A1", 0, -60, 1000), rep("A1", 0, -62, 1010)});
    CHECK(p.size() == 2);
  }
  SECTION("different anchors never pair") {
    auto p = group_packets(std::vector{rep("A1", 0, -60, 1000), rep("A2", 1, -62, 1000)});
    CHECK(p.size() == 2);
  }
  SECTION("membership map") {
    std::vector<RawReport> r{rep("A1", 1, -62, 1100), rep("A1", 0, -60, 1000),
                             rep("A1", 0, -61, 1101)};
    std::vector<std::size_t> of;
    auto p = group_packets(r, &of);
    REQUIRE(p.size() == 2);
    CHECK(of[1] != of[0]);
    CHECK(of[0] == of[2]);
    CHECK(p[of[1]].receivers_used == 1);
  }
}

TEST_CASE("report validation", "[measurement]") {
  CHECK_NOTHROW(validate_report(rep("A1", 0, -120.0, 0)));
  CHECK_NOTHROW(validate_report(rep("A1", 1, 0.0, 0)));
  CHECK(code_of([] { validate_report(rep("A1", 2, -60, 0)); }) == ErrorCode::Invalid);
  CHECK(code_of([] { validate_report(rep("A1", 0, -120.1, 0)); }) == ErrorCode::Invalid);
  CHECK(code_of([] { validate_report(rep("A1", 0, 0.5, 0)); }) == ErrorCode::Invalid);
  CHECK(code_of([] { validate_report(rep("A1", 0, std::nan(""), 0)); }) == ErrorCode::Invalid);
  CHECK(code_of([] { validate_report(rep("A 1", 0, -60, 0)); }) == ErrorCode::Invalid);
}

TEST_CASE("windows are aligned to wall-clock seconds", "[measurement]") {
  CHECK(window_start_of(1'700'000'000'999) == 1'700'000'000'000);
  CHECK(window_start_of(1000) == 1000);
  CHECK(window_start_of(-1) == -1000);
  CHECK(window_start_of(-1000) == -1000);
}
