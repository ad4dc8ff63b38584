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
#include "bletrack/config.hpp"

#include "bletrack/error.hpp"

#include <json.hpp>

#include <charconv>
#include <fstream>
#include <sstream>

namespace bletrack {

namespace {

using nlohmann::json;

template <typename T>
void read_opt(const json& obj, const char* key, T& out) {
  if (auto it = obj.find(key); it != obj.end() && !it->is_null())
    out = it->get<T>();
}

AnchorConfig parse_anchor(const json& j) {
  AnchorConfig a;
  a.id = j.at("id").get<std::string>();
  a.position = {j.at("x").get<double>(), j.at("y").get<double>()};
  read_opt(j, "p0", a.p0);
  read_opt(j, "gamma", a.gamma);
  read_opt(j, "d0", a.d0);
  read_opt(j, "sigma_rss", a.sigma_rss);
  return a;
}

TrajectoryScript parse_tag(const json& j, double scenario_duration) {
  const auto id = j.at("id").get<std::string>();
  if (auto pacing = j.find("pacing"); pacing != j.end()) {
    const auto& c = pacing->at("center");
    double duration = scenario_duration;
    read_opt(*pacing, "duration_s", duration);
    return make_pacing_script(id, {c.at(0).get<double>(), c.at(1).get<double>()},
                              pacing->at("length_m").get<double>(),
                              pacing->at("speed_mps").get<double>(), duration);
  }
  TrajectoryScript script{id, {}};
  for (const auto& w : j.at("waypoints")) {
    if (!w.is_array() || w.size() != 3)
      throw Error(ErrorCode::InvalidScenario, "waypoints are [t, x, y] triples");
    script.waypoints.push_back({w[0].get<double>(), w[1].get<double>(), w[2].get<double>()});
  }
  return script;
}

Scenario parse_scenario(const json& j, const DeploymentConfig& dep) {
  Scenario sc;
  sc.name = dep.name;
  sc.anchors = dep.tracker.anchors;
  sc.d_min = dep.tracker.d_min;
  const auto& area = j.at("area");
  sc.width = area.at(0).get<double>();
  sc.height = area.at(1).get<double>();
  sc.duration_s = j.at("duration_s").get<double>();
  read_opt(j, "advertise_hz", sc.advertise_hz);
  read_opt(j, "seed", sc.seed);
  read_opt(j, "start_ms", sc.start_ms);
  if (auto it = j.find("max_range_m"); it != j.end() && !it->is_null())
    sc.max_range_m = it->get<double>();
  if (auto n = j.find("noise"); n != j.end()) {
    read_opt(*n, "sigma_db", sc.noise.sigma_db);
    read_opt(*n, "drop_probability", sc.noise.drop_probability);
    read_opt(*n, "anchor_bias_db", sc.noise.anchor_bias_db);
  }
  if (auto tags = j.find("tags"); tags != j.end())
    for (const auto& t : *tags)
      sc.tags.push_back(parse_tag(t, sc.duration_s));
  return sc;
}

} // namespace

void DeploymentConfig::validate() const {
  tracker.validate();
  detector.validate();
  if (ingest.reorder_watermark_ms < 0)
    throw Error(ErrorCode::InvalidConfig, "ingest.reorder_watermark_ms must be >= 0");
  split_host_port(ingest.listen);
  if (scenario)
    scenario->validate();
}

DeploymentConfig parse_config(std::string_view text) {
  DeploymentConfig cfg;
  try {
    const json j = json::parse(text);
    read_opt(j, "name", cfg.name);
    for (const auto& a : j.at("anchors"))
      cfg.tracker.anchors.push_back(parse_anchor(a));
    if (auto m = j.find("motion"); m != j.end()) {
      read_opt(*m, "step_T", cfg.tracker.motion.step_T);
      read_opt(*m, "sigma_a", cfg.tracker.motion.sigma_a);
    }
    if (auto t = j.find("tracker"); t != j.end()) {
      read_opt(*t, "min_anchors_for_update", cfg.tracker.min_anchors_for_update);
      read_opt(*t, "d_min", cfg.tracker.d_min);
      read_opt(*t, "init_covariance_diag", cfg.tracker.init_covariance_diag);
      read_opt(*t, "max_coast_windows", cfg.tracker.max_coast_windows);
    }
    if (auto d = j.find("detector"); d != j.end()) {
      read_opt(*d, "window_s", cfg.detector.window_s);
      read_opt(*d, "stride_s", cfg.detector.stride_s);
      read_opt(*d, "min_distance_m", cfg.detector.min_distance_m);
      read_opt(*d, "min_loiter_ratio", cfg.detector.min_loiter_ratio);
      read_opt(*d, "min_speed_mps", cfg.detector.min_speed_mps);
    }
    if (auto i = j.find("ingest"); i != j.end()) {
      read_opt(*i, "listen", cfg.ingest.listen);
      read_opt(*i, "reorder_watermark_ms", cfg.ingest.reorder_watermark_ms);
    }
    if (auto s = j.find("scenario"); s != j.end() && !s->is_null())
      cfg.scenario = parse_scenario(*s, cfg);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::InvalidConfig, e.what());
  }
  cfg.validate();
  return cfg;
}

DeploymentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw Error(ErrorCode::IoFailure, "cannot open config " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::pair<std::string, int> split_host_port(std::string_view address) {
  const auto colon = address.rfind(':');
  if (colon == std::string_view::npos || colon == 0)
    throw Error(ErrorCode::InvalidConfig, "address must be host:port");
  int port = -1;
  const auto digits = address.substr(colon + 1);
  auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), port);
  if (ec != std::errc{} || ptr != digits.data() + digits.size() || port < 0 || port > 65535)
    throw Error(ErrorCode::InvalidConfig, "bad port in '" + std::string(address) + "'");
  return {std::string(address.substr(0, colon)), port};
}

} // namespace bletrack
