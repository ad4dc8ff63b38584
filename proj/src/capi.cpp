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

#include "bletrack/config.hpp"
#include "bletrack/error.hpp"
#include "bletrack/ingest.hpp"
#include "bletrack/pipeline.hpp"
#include "bletrack/simulator.hpp"
#include "bletrack/trajectory_log.hpp"
#include "bletrack/wander.hpp"
#include "bletrack/wire.hpp"

#include <cstring>
#include <deque>
#include <memory>
#include <string>

struct bt_config {
  bletrack::DeploymentConfig value;
};

struct bt_tracker {
  std::unique_ptr<bletrack::Router> router;
  std::deque<bletrack::TrajectoryLogRecord> queue;
};

struct bt_server {
  std::unique_ptr<bletrack::IngestServer> server;
};

namespace {

using namespace bletrack;

thread_local std::string g_last_error;

bt_status status_for(ErrorCode code) {
  switch (code) {
  case ErrorCode::InvalidConfig: return BT_ERR_CONFIG;
  case ErrorCode::InvalidScenario: return BT_ERR_SCENARIO;
  case ErrorCode::Malformed: return BT_ERR_MALFORMED;
  case ErrorCode::VersionUnsupported: return BT_ERR_VERSION;
  case ErrorCode::IoFailure: return BT_ERR_IO;
  case ErrorCode::BindFailure: return BT_ERR_BIND;
  case ErrorCode::Network: return BT_ERR_NETWORK;
  case ErrorCode::EmptyInput:
  case ErrorCode::EmptyWindow:
  case ErrorCode::EmptyFrame:
  case ErrorCode::NoInput: return BT_ERR_EMPTY;
  case ErrorCode::Invalid:
  case ErrorCode::MixedIdentity:
  case ErrorCode::DuplicateAnchor:
  case ErrorCode::UnknownAnchor: return BT_ERR_INVALID;
  }
  return BT_ERR_INTERNAL;
}

template <typename Fn>
bt_status guarded(Fn&& fn) noexcept {
  try {
    g_last_error.clear();
    return fn();
  } catch (const Error& e) {
    g_last_error = e.what();
    return status_for(e.code());
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return BT_ERR_INTERNAL;
  } catch (...) {
    g_last_error = "unknown exception";
    return BT_ERR_INTERNAL;
  }
}

bt_status argument_error(const char* what) {
  g_last_error = what;
  return BT_ERR_ARGUMENT;
}

void copy_id(char (&dst)[BT_ID_CAPACITY], const std::string& src) {
  const std::size_t n = std::min(src.size(), std::size_t{BT_ID_CAPACITY - 1});
  std::memcpy(dst, src.data(), n);
  dst[n] = '\0';
}

void to_c(const TrajectoryLogRecord& r, bt_log_record* out) {
  copy_id(out->tag_id, r.tag_id);
  out->t_ms = r.t_ms;
  out->x_m = r.x_m;
  out->y_m = r.y_m;
  out->vx_mps = r.vx_mps;
  out->vy_mps = r.vy_mps;
  out->p_trace = r.p_trace;
  out->n_anchors_used = r.n_anchors_used;
  out->coast = r.coast ? 1 : 0;
}

bt_status copy_string(const std::string& s, char* buf, size_t len) {
  if (!buf || len == 0)
    return argument_error("null or empty output buffer");
  if (s.size() + 1 > len)
    return argument_error("output buffer too small");
  std::memcpy(buf, s.c_str(), s.size() + 1);
  return BT_OK;
}

} // namespace

extern "C" {

const char* bt_version(void) { return "0.3.0"; }

const char* bt_last_error(void) { return g_last_error.c_str(); }

const char* bt_status_name(bt_status status) {
  switch (status) {
  case BT_OK: return "ok";
  case BT_ERR_ARGUMENT: return "argument";
  case BT_ERR_CONFIG: return "config";
  case BT_ERR_SCENARIO: return "scenario";
  case BT_ERR_MALFORMED: return "malformed";
  case BT_ERR_INVALID: return "invalid";
  case BT_ERR_VERSION: return "version";
  case BT_ERR_IO: return "io";
  case BT_ERR_BIND: return "bind";
  case BT_ERR_NETWORK: return "network";
  case BT_ERR_EMPTY: return "empty";
  case BT_ERR_INTERNAL: return "internal";
  }
  return "unknown";
}

bt_status bt_config_load(const char* path, bt_config** out) {
  if (!path || !out)
    return argument_error("null argument");
  return guarded([&] {
    *out = new bt_config{load_config(path)};
    return BT_OK;
  });
}

bt_status bt_config_parse(const char* json_text, bt_config** out) {
  if (!json_text || !out)
    return argument_error("null argument");
  return guarded([&] {
    *out = new bt_config{parse_config(json_text)};
    return BT_OK;
  });
}

void bt_config_free(bt_config* config) { delete config; }

size_t bt_config_anchor_count(const bt_config* config) {
  return config ? config->value.tracker.anchors.size() : 0;
}

int bt_config_has_scenario(const bt_config* config) {
  return config && config->value.scenario ? 1 : 0;
}

bt_status bt_config_listen_address(const bt_config* config, char* buf, size_t len) {
  if (!config)
    return argument_error("null config");
  return copy_string(config->value.ingest.listen, buf, len);
}

bt_status bt_parse_report(const char* line, size_t len, bt_raw_report* out) {
  if (!line || !out)
    return argument_error("null argument");
  return guarded([&] {
    const RawReport r = parse_report(std::string_view(line, len));
    copy_id(out->anchor_id, r.anchor_id);
    copy_id(out->tag_id, r.tag_id);
    out->receiver_index = r.receiver_index;
    out->rssi_dbm = r.rssi;
    out->timestamp_ms = r.timestamp_ms;
    return BT_OK;
  });
}

bt_status bt_format_report(const bt_raw_report* report, char* buf, size_t len) {
  if (!report)
    return argument_error("null report");
  return guarded([&] {
    RawReport r{report->anchor_id, report->receiver_index, report->tag_id, report->rssi_dbm,
                report->timestamp_ms};
    validate_report(r);
    return copy_string(format_report(r), buf, len);
  });
}

bt_status bt_simulate(const bt_config* config, const uint64_t* seed_override,
                      const char* reports_path, const char* truth_path) {
  if (!config || !reports_path)
    return argument_error("null argument");
  return guarded([&] {
    if (!config->value.scenario)
      throw Error(ErrorCode::InvalidScenario, "configuration has no scenario section");
    Scenario sc = *config->value.scenario;
    if (seed_override)
      sc.seed = *seed_override;
    const Emission em = emit(sc);
    write_file(reports_path, format_report_lines(em.reports));
    if (truth_path)
      write_file(truth_path, format_ground_truth(em.truth, sc.start_ms));
    return BT_OK;
  });
}

bt_status bt_track_file(const bt_config* config, const char* reports_path, const char* log_path,
                        bt_track_stats* stats) {
  if (!config || !reports_path || !log_path)
    return argument_error("null argument");
  return guarded([&] {
    const auto lines = split_lines(read_file(reports_path));
    const OfflineResult res = run_offline(lines, config->value.tracker);
    write_log(log_path, res.records);
    if (stats)
      *stats = bt_track_stats{res.lines, res.parse_errors, res.router.unknown_anchor,
                              res.records.size()};
    return BT_OK;
  });
}

bt_status bt_analyze_file(const bt_config* config, const char* log_path, const char* report_path,
                          size_t* episode_count) {
  if (!config || !log_path || !report_path)
    return argument_error("null argument");
  return guarded([&] {
    const ParsedLog log = read_log(log_path);
    std::vector<WanderEpisode> episodes;
    for (const auto& traj : trajectories_from_log(log.records)) {
      auto det = detect_episodes(traj, config->value.detector);
      episodes.insert(episodes.end(), det.episodes.begin(), det.episodes.end());
    }
    write_file(report_path, format_episode_report(episodes));
    if (episode_count)
      *episode_count = episodes.size();
    return BT_OK;
  });
}

bt_status bt_export_file(const char* log_path, const char* format, const char* out_path) {
  if (!log_path || !format || !out_path)
    return argument_error("null argument");
  return guarded([&] {
    const ParsedLog log = read_log(log_path);
    const std::string_view fmt(format);
    if (fmt == "csv")
      write_log(out_path, log.records);
    else if (fmt == "geojson")
      write_file(out_path, export_geojson(log.records));
    else
      return argument_error("format must be csv or geojson");
    return BT_OK;
  });
}

bt_status bt_tracker_create(const bt_config* config, int64_t reorder_watermark_ms,
                            bt_tracker** out) {
  if (!config || !out)
    return argument_error("null argument");
  return guarded([&] {
    RouterOptions opts{std::max<int64_t>(reorder_watermark_ms, 0), reorder_watermark_ms >= 0};
    auto t = std::make_unique<bt_tracker>();
    t->router = std::make_unique<Router>(config->value.tracker, opts);
    *out = t.release();
    return BT_OK;
  });
}

void bt_tracker_free(bt_tracker* tracker) { delete tracker; }

bt_status bt_tracker_push_line(bt_tracker* tracker, const char* line, size_t len) {
  if (!tracker || !line)
    return argument_error("null argument");
  return guarded([&] {
    const PushResult res = tracker->router->push(parse_report(std::string_view(line, len)));
    for (auto& r : tracker->router->poll())
      tracker->queue.push_back(std::move(r));
    if (res == PushResult::UnknownAnchor)
      throw Error(ErrorCode::UnknownAnchor, "report from unconfigured anchor");
    return BT_OK;
  });
}

bt_status bt_tracker_flush(bt_tracker* tracker) {
  if (!tracker)
    return argument_error("null tracker");
  return guarded([&] {
    for (auto& r : tracker->router->flush())
      tracker->queue.push_back(std::move(r));
    return BT_OK;
  });
}

bt_status bt_tracker_pop(bt_tracker* tracker, bt_log_record* out) {
  if (!tracker || !out)
    return argument_error("null argument");
  if (tracker->queue.empty())
    return BT_ERR_EMPTY;
  to_c(tracker->queue.front(), out);
  tracker->queue.pop_front();
  return BT_OK;
}

size_t bt_tracker_pending(const bt_tracker* tracker) { return tracker ? tracker->queue.size() : 0; }

uint64_t bt_tracker_late_dropped(const bt_tracker* tracker) {
  return tracker ? tracker->router->stats().late_dropped : 0;
}

bt_status bt_server_start(const bt_config* config, const char* listen, const char* log_path,
                          bt_server** out) {
  if (!config || !out)
    return argument_error("null argument");
  return guarded([&] {
    IngestOptions opts = config->value.ingest;
    if (listen)
      opts.listen = listen;
    std::optional<std::filesystem::path> log;
    if (log_path)
      log = log_path;
    auto s = std::make_unique<bt_server>();
    s->server = std::make_unique<IngestServer>(config->value.tracker, opts, log);
    s->server->start();
    *out = s.release();
    return BT_OK;
  });
}

int bt_server_port(const bt_server* server) { return server ? server->server->port() : -1; }

bt_status bt_server_subscribe(bt_server* server, bt_record_callback callback, void* user) {
  if (!server || !callback)
    return argument_error("null argument");
  return guarded([&] {
    server->server->subscribe([callback, user](const TrajectoryLogRecord& r) {
      bt_log_record rec{};
      to_c(r, &rec);
      callback(&rec, user);
    });
    return BT_OK;
  });
}

bt_status bt_server_stats(const bt_server* server, bt_ingest_stats* out) {
  if (!server || !out)
    return argument_error("null argument");
  const IngestStats s = server->server->stats();
  *out = bt_ingest_stats{s.connections_total, s.connections_open, s.lines, s.parse_errors,
                         s.late_dropped, s.unknown_anchor, s.records};
  return BT_OK;
}

bt_status bt_server_wait_idle(bt_server* server, int64_t idle_ms, int64_t timeout_ms) {
  if (!server)
    return argument_error("null server");
  return guarded([&] {
    return server->server->wait_idle(std::chrono::milliseconds(idle_ms),
                                     std::chrono::milliseconds(timeout_ms))
               ? BT_OK
               : BT_ERR_EMPTY;
  });
}

bt_status bt_server_stop(bt_server* server) {
  if (!server)
    return argument_error("null server");
  return guarded([&] {
    server->server->stop();
    return BT_OK;
  });
}

void bt_server_free(bt_server* server) { delete server; }

bt_status bt_replay(const char* reports_path, const char* host, int port, double speed,
                    int per_anchor_connections, uint64_t* lines_sent) {
  if (!reports_path || !host)
    return argument_error("null argument");
  return guarded([&] {
    const auto lines = split_lines(read_file(reports_path));
    const ReplayStats st = replay(lines, host, port, ReplayOptions{speed, per_anchor_connections != 0});
    if (lines_sent)
      *lines_sent = st.lines_sent;
    return BT_OK;
  });
}

} // extern "C"
