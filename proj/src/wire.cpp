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
#include "bletrack/wire.hpp"

#include "bletrack/error.hpp"

#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <limits>

namespace bletrack {

namespace {

using nlohmann::json;

const json& require(const json& obj, const char* key) {
  auto it = obj.find(key);
  if (it == obj.end())
    throw Error(ErrorCode::Malformed, std::string("missing field '") + key + "'");
  return *it;
}

double rounded_rssi(double rssi) {
  double q = std::round(rssi * 10.0) / 10.0;
  return q == 0.0 ? 0.0 : q; // no "-0.0" on the wire
}

} // namespace

RawReport parse_report(std::string_view line) {
  if (line.size() > kMaxWireLineBytes)
    throw Error(ErrorCode::Malformed, "line exceeds 1024 bytes");
  while (!line.empty() && (line.back() == '\n' || line.back() == '\r'))
    line.remove_suffix(1);

  const json obj = json::parse(line.begin(), line.end(), nullptr, /*allow_exceptions=*/false);
  if (obj.is_discarded() || !obj.is_object())
    throw Error(ErrorCode::Malformed, "not a flat key-value record");
  for (const auto& [key, value] : obj.items())
    if (value.is_structured())
      throw Error(ErrorCode::Malformed, "nested value under '" + key + "'");

  const json& v = require(obj, "v");
  if (!v.is_number_integer())
    throw Error(ErrorCode::Malformed, "version must be an integer");
  if (v.get<std::int64_t>() != kWireVersion)
    throw Error(ErrorCode::VersionUnsupported, "wire version " + v.dump());

  const json& a = require(obj, "a");
  const json& r = require(obj, "r");
  const json& g = require(obj, "g");
  const json& s = require(obj, "s");
  const json& t = require(obj, "t");
  if (!a.is_string() || !g.is_string())
    throw Error(ErrorCode::Malformed, "anchor and tag ids must be strings");
  if (!r.is_number_integer())
    throw Error(ErrorCode::Malformed, "receiver index must be an integer");
  if (!s.is_number())
    throw Error(ErrorCode::Malformed, "rssi must be a number");
  if (!t.is_number_integer())
    throw Error(ErrorCode::Malformed, "timestamp must be an integer");
  if (t.is_number_unsigned() &&
      t.get<std::uint64_t>() > static_cast<std::uint64_t>(std::numeric_limits<std::int64_t>::max()))
    throw Error(ErrorCode::Invalid, "timestamp out of range");

  RawReport out;
  out.anchor_id = a.get<std::string>();
  out.tag_id = g.get<std::string>();
  const auto rx = r.get<std::int64_t>();
  if (rx != 0 && rx != 1)
    throw Error(ErrorCode::Invalid, "receiver index must be 0 or 1");
  out.receiver_index = static_cast<int>(rx);
  out.rssi = s.get<double>();
  out.timestamp_ms = t.get<std::int64_t>();
  validate_report(out);
  return out;
}

std::string format_report(const RawReport& r) {
  char rssi[32];
  std::snprintf(rssi, sizeof rssi, "%.1f", rounded_rssi(r.rssi));
  std::string out;
  out.reserve(64 + r.anchor_id.size() + r.tag_id.size());
  out += "{\"v\":1,\"a\":\"";
  out += r.anchor_id;
  out += "\",\"r\":";
  out += std::to_string(r.receiver_index);
  out += ",\"g\":\"";
  out += r.tag_id;
  out += "\",\"s\":";
  out += rssi;
  out += ",\"t\":";
  out += std::to_string(r.timestamp_ms);
  out += '}';
  return out;
}

RawReport quantize_report(RawReport report) {
  report.rssi = rounded_rssi(report.rssi);
  return report;
}

} // namespace bletrack
