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
#include "bletrack/bletrack.h"

#include <catch_amalgamated.hpp>

#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

namespace fs = std::filesystem;

namespace {

const std::string kConfigPath = std::string(BLETRACK_SOURCE_DIR) + "/configs/fig2-corridors.json";

struct ConfigHandle {
  bt_config* ptr = nullptr;
  ~ConfigHandle() { bt_config_free(ptr); }
};

fs::path work_dir() {
  auto dir = fs::temp_directory_path() / "bletrack_test_capi";
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Short scenario over the reference anchors, so the tests stay quick.
const char* kShortScenario = R"({
  "anchors": [{"id": "A1", "x": 0.5, "y": 3}, {"id": "A2", "x": 7, "y": 1},
              {"id": "A3", "x": 12.5, "y": 3}, {"id": "A4", "x": 16, "y": 1}],
  "scenario": {"area": [30, 15], "duration_s": 20, "seed": 3,
               "noise": {"sigma_db": 3},
               "tags": [{"id": "T1", "pacing": {"center": [8, 2], "length_m": 7, "speed_mps": 0.667}}]}
})";

} // namespace

TEST_CASE("version and status names", "[capi]") {
  CHECK(std::string(bt_version()) == "0.3.0");
  CHECK(std::string(bt_status_name(BT_OK)) == "ok");
  CHECK(std::string(bt_status_name(BT_ERR_BIND)) == "bind");
  CHECK(std::string(bt_status_name(static_cast<bt_status>(1234))) == "unknown");
}

TEST_CASE("configuration handles", "[capi]") {
  ConfigHandle cfg;
  REQUIRE(bt_config_load(kConfigPath.c_str(), &cfg.ptr) == BT_OK);
  CHECK(bt_config_anchor_count(cfg.ptr) == 7);
  CHECK(bt_config_has_scenario(cfg.ptr) == 1);
  char addr[64];
  REQUIRE(bt_config_listen_address(cfg.ptr, addr, sizeof addr) == BT_OK);
  CHECK(std::string(addr) == "127.0.0.1:7400");
  char tiny[4];
  CHECK(bt_config_listen_address(cfg.ptr, tiny, sizeof tiny) == BT_ERR_ARGUMENT);

  bt_config* bad = nullptr;
  CHECK(bt_config_parse("{\"anchors\": []}", &bad) == BT_ERR_CONFIG);
  CHECK(bad == nullptr);
  CHECK(std::strlen(bt_last_error()) > 0);
  CHECK(bt_config_load("/nonexistent.json", &bad) == BT_ERR_IO);
  CHECK(bt_config_parse(nullptr, &bad) == BT_ERR_ARGUMENT);
  bt_config_free(nullptr);
}

TEST_CASE("wire format through the C interface", "[capi]") {
  const std::string line = R"({"v":1,"a":"A3","r":0,"g":"T1","s":-67.5,"t":1700000000000})";
  bt_raw_report r{};
  REQUIRE(bt_parse_report(line.data(), line.size(), &r) == BT_OK);
  CHECK(std::string(r.anchor_id) == "A3");
  CHECK(r.receiver_index == 0);
  CHECK(std::string(r.tag_id) == "T1");
  CHECK(r.rssi_dbm == -67.5);
  CHECK(r.timestamp_ms == 1700000000000);

  char buf[256];
  REQUIRE(bt_format_report(&r, buf, sizeof buf) == BT_OK);
  CHECK(line == buf);

  const std::string bad_rx = R"({"v":1,"a":"A3","r":2,"g":"T1","s":-67.5,"t":1})";
  CHECK(bt_parse_report(bad_rx.data(), bad_rx.size(), &r) == BT_ERR_INVALID);
  CHECK(bt_parse_report("{\"v\":1", 6, &r) == BT_ERR_MALFORMED);
  const std::string v2 = R"({"v":2,"a":"A3","r":0,"g":"T1","s":-67.5,"t":1})";
  CHECK(bt_parse_report(v2.data(), v2.size(), &r) == BT_ERR_VERSION);
}

TEST_CASE("simulate, track, analyze and export files", "[capi]") {
  ConfigHandle cfg;
  REQUIRE(bt_config_parse(kShortScenario, &cfg.ptr) == BT_OK);
  const auto dir = work_dir();
  const auto reports = (dir / "reports.jsonl").string();
  const auto truth = (dir / "truth.csv").string();
  const auto log = (dir / "track.csv").string();
  const auto episodes = (dir / "episodes.csv").string();
  const auto geo = (dir / "track.geojson").string();

  REQUIRE(bt_simulate(cfg.ptr, nullptr, reports.c_str(), truth.c_str()) == BT_OK);
  const auto first = slurp(reports);
  const uint64_t same_seed = 3;
  REQUIRE(bt_simulate(cfg.ptr, &same_seed, reports.c_str(), nullptr) == BT_OK);
  CHECK(slurp(reports) == first);
  const uint64_t other_seed = 4;
  REQUIRE(bt_simulate(cfg.ptr, &other_seed, (dir / "other.jsonl").string().c_str(), nullptr) == BT_OK);
  CHECK(slurp(dir / "other.jsonl") != first);

  bt_track_stats ts{};
  REQUIRE(bt_track_file(cfg.ptr, reports.c_str(), log.c_str(), &ts) == BT_OK);
  CHECK(ts.lines == 20 * 10 * 4 * 2);
  CHECK(ts.parse_errors == 0);
  CHECK(ts.records == 20);
  const auto log_text = slurp(log);
  CHECK(log_text.rfind("tag_id,t_ms,x_m,y_m,vx_mps,vy_mps,p_trace,n_anchors_used,coast_flag\n", 0) == 0);

  size_t n = 99;
  REQUIRE(bt_analyze_file(cfg.ptr, log.c_str(), episodes.c_str(), &n) == BT_OK);
  CHECK(n == 0); // shorter than one detector window
  CHECK(slurp(episodes) == "tag_id,start,end,distance_m,extent_m,mean_speed_mps\n");

  REQUIRE(bt_export_file(log.c_str(), "geojson", geo.c_str()) == BT_OK);
  CHECK(slurp(geo).find("\"LineString\"") != std::string::npos);
  REQUIRE(bt_export_file(log.c_str(), "csv", (dir / "copy.csv").string().c_str()) == BT_OK);
  CHECK(slurp(dir / "copy.csv") == log_text);
  CHECK(bt_export_file(log.c_str(), "kml", geo.c_str()) == BT_ERR_ARGUMENT);
  CHECK(bt_track_file(cfg.ptr, "/nonexistent/reports", log.c_str(), nullptr) == BT_ERR_IO);

  ConfigHandle bare;
  REQUIRE(bt_config_parse(R"({"anchors": [{"id": "A1", "x": 0, "y": 0}]})", &bare.ptr) == BT_OK);
  CHECK(bt_simulate(bare.ptr, nullptr, reports.c_str(), nullptr) == BT_ERR_SCENARIO);
}

TEST_CASE("streaming tracker", "[capi]") {
  ConfigHandle cfg;
  REQUIRE(bt_config_parse(kShortScenario, &cfg.ptr) == BT_OK);
  const auto dir = work_dir();
  const auto reports = (dir / "stream.jsonl").string();
  const auto log = (dir / "stream.csv").string();
  REQUIRE(bt_simulate(cfg.ptr, nullptr, reports.c_str(), nullptr) == BT_OK);
  REQUIRE(bt_track_file(cfg.ptr, reports.c_str(), log.c_str(), nullptr) == BT_OK);

  bt_tracker* tr = nullptr;
  REQUIRE(bt_tracker_create(cfg.ptr, 2000, &tr) == BT_OK);
  std::ifstream in(reports);
  std::string line;
  while (std::getline(in, line))
    REQUIRE(bt_tracker_push_line(tr, line.data(), line.size()) == BT_OK);
  CHECK(bt_tracker_pending(tr) > 0);
  CHECK(bt_tracker_push_line(tr, "junk", 4) == BT_ERR_MALFORMED);
  REQUIRE(bt_tracker_flush(tr) == BT_OK);
  CHECK(bt_tracker_pending(tr) == 20);

  std::vector<bt_log_record> recs;
  bt_log_record rec;
  while (bt_tracker_pop(tr, &rec) == BT_OK)
    recs.push_back(rec);
  CHECK(recs.size() == 20);
  CHECK(bt_tracker_pop(tr, &rec) == BT_ERR_EMPTY);

  // Same numbers as the batch log.
  std::ifstream batch(log);
  std::getline(batch, line);
  for (const auto& r : recs) {
    REQUIRE(std::getline(batch, line));
    CHECK(line.rfind(std::string(r.tag_id) + "," + std::to_string(r.t_ms) + ",", 0) == 0);
  }

  const std::string stale = R"({"v":1,"a":"A1","r":0,"g":"T1","s":-60,"t":1700000000000})";
  CHECK(bt_tracker_push_line(tr, stale.data(), stale.size()) == BT_OK);
  CHECK(bt_tracker_late_dropped(tr) == 1);
  bt_tracker_free(tr);
  CHECK(bt_tracker_create(nullptr, 0, &tr) == BT_ERR_ARGUMENT);
}

namespace {
void collect(const bt_log_record* r, void* user) {
  static_cast<std::vector<bt_log_record>*>(user)->push_back(*r);
}
} // namespace

TEST_CASE("live server and replay", "[capi]") {
  ConfigHandle cfg;
  REQUIRE(bt_config_parse(kShortScenario, &cfg.ptr) == BT_OK);
  const auto dir = work_dir();
  const auto reports = (dir / "live.jsonl").string();
  const auto offline_log = (dir / "offline.csv").string();
  const auto live_log = (dir / "live.csv").string();
  fs::remove(live_log);
  REQUIRE(bt_simulate(cfg.ptr, nullptr, reports.c_str(), nullptr) == BT_OK);
  REQUIRE(bt_track_file(cfg.ptr, reports.c_str(), offline_log.c_str(), nullptr) == BT_OK);

  bt_server* srv = nullptr;
  REQUIRE(bt_server_start(cfg.ptr, "127.0.0.1:0", live_log.c_str(), &srv) == BT_OK);
  std::vector<bt_log_record> got;
  REQUIRE(bt_server_subscribe(srv, collect, &got) == BT_OK);
  const int port = bt_server_port(srv);
  REQUIRE(port > 0);

  uint64_t sent = 0;
  REQUIRE(bt_replay(reports.c_str(), "127.0.0.1", port, 20.0, 1, &sent) == BT_OK);
  CHECK(sent == 20 * 10 * 4 * 2);
  REQUIRE(bt_server_wait_idle(srv, 100, 20000) == BT_OK);
  REQUIRE(bt_server_stop(srv) == BT_OK);
  bt_ingest_stats st{};
  REQUIRE(bt_server_stats(srv, &st) == BT_OK);
  CHECK(st.connections_total == 4);
  CHECK(st.records == 20);
  bt_server_free(srv);

  CHECK(got.size() == 20);
  CHECK(slurp(live_log) == slurp(offline_log));

  bt_server* clash = nullptr;
  REQUIRE(bt_server_start(cfg.ptr, "127.0.0.1:0", nullptr, &srv) == BT_OK);
  const std::string taken = "127.0.0.1:" + std::to_string(bt_server_port(srv));
  CHECK(bt_server_start(cfg.ptr, taken.c_str(), nullptr, &clash) == BT_ERR_BIND);
  CHECK(clash == nullptr);
  bt_server_free(srv);
}
