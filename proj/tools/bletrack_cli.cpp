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
// bletrack command line: simulate, track, serve, analyze, replay, export.
// Built purely on the C interface.

#include "bletrack/bletrack.h"

#include <CLI11.hpp>

#include <atomic>
#include <csignal>
#include <cstdio>
#include <memory>
#include <optional>
#include <string>

namespace {

std::atomic<bool> g_interrupted{false};

extern "C" void on_signal(int) { g_interrupted = true; }

int fail(const char* what, bt_status st) {
  std::fprintf(stderr, "bletrack %s: %s error: %s\n", what, bt_status_name(st), bt_last_error());
  return 1;
}

struct ConfigDeleter {
  void operator()(bt_config* c) const noexcept { bt_config_free(c); }
};
using ConfigPtr = std::unique_ptr<bt_config, ConfigDeleter>;

struct ServerDeleter {
  void operator()(bt_server* s) const noexcept { bt_server_free(s); }
};
using ServerPtr = std::unique_ptr<bt_server, ServerDeleter>;

std::optional<ConfigPtr> load(const std::string& path) {
  bt_config* raw = nullptr;
  if (bt_status st = bt_config_load(path.c_str(), &raw); st != BT_OK) {
    fail("config", st);
    return std::nullopt;
  }
  return ConfigPtr(raw);
}

void print_record(const bt_log_record* r, void*) {
  std::printf("%s %lld x=%.2f y=%.2f vx=%.2f vy=%.2f anchors=%d%s\n", r->tag_id,
              static_cast<long long>(r->t_ms), r->x_m, r->y_m, r->vx_mps, r->vy_mps,
              r->n_anchors_used, r->coast ? " coast" : "");
  std::fflush(stdout);
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"BLE RSS indoor tracking and wandering detection"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(bt_version()));

  std::string config_path, in_path, out_path, truth_path, listen, target, format = "geojson";
  std::optional<std::uint64_t> seed;
  double speed = 1.0, idle_exit = 0.0;
  bool per_anchor = false, echo = false;

  auto* simulate = app.add_subcommand("simulate", "Scenario -> wire report file (+ ground truth)");
  simulate->add_option("--config", config_path, "Config file with a scenario section")->required();
  simulate->add_option("--seed", seed, "Override the scenario seed");
  simulate->add_option("--out", out_path, "Report file to write")->required();
  simulate->add_option("--truth", truth_path, "Ground truth CSV to write");

  auto* track = app.add_subcommand("track", "Report file -> trajectory log");
  track->add_option("--config", config_path, "Deployment config")->required();
  track->add_option("--in", in_path, "Wire report file")->required();
  track->add_option("--out", out_path, "Trajectory log CSV")->required();

  auto* serve = app.add_subcommand("serve", "Live ingest from anchors over TCP");
  serve->add_option("--config", config_path, "Deployment config")->required();
  serve->add_option("--listen", listen, "host:port (default: config ingest.listen)");
  serve->add_option("--out", out_path, "Trajectory log CSV (appended)")->required();
  serve->add_option("--idle-exit", idle_exit,
                    "Exit after all anchors disconnect and N seconds pass idle");
  serve->add_flag("--echo", echo, "Print records to stdout as they are produced");

  auto* analyze = app.add_subcommand("analyze", "Trajectory log -> wandering episode report");
  analyze->add_option("--config", config_path, "Deployment config (detector section)")->required();
  analyze->add_option("--in", in_path, "Trajectory log CSV")->required();
  analyze->add_option("--out", out_path, "Episode report CSV")->required();

  auto* replay = app.add_subcommand("replay", "Report file -> ingest socket");
  replay->add_option("--in", in_path, "Wire report file")->required();
  replay->add_option("--to", target, "host:port of a running serve");
  replay->add_option("--config", config_path, "Take the target from ingest.listen");
  replay->add_option("--speed", speed, "Playback rate; 0 sends unpaced")->capture_default_str();
  replay->add_flag("--per-anchor", per_anchor, "One connection per anchor");

  auto* exporter = app.add_subcommand("export", "Trajectory log -> csv or geojson");
  exporter->add_option("--in", in_path, "Trajectory log CSV")->required();
  exporter->add_option("--format", format, "csv | geojson")
      ->check(CLI::IsMember({"csv", "geojson"}))
      ->capture_default_str();
  exporter->add_option("--out", out_path, "Output file")->required();

  CLI11_PARSE(app, argc, argv);

  if (simulate->parsed()) {
    auto cfg = load(config_path);
    if (!cfg)
      return 1;
    const std::uint64_t* seed_ptr = seed ? &*seed : nullptr;
    if (bt_status st = bt_simulate(cfg->get(), seed_ptr, out_path.c_str(),
                                   truth_path.empty() ? nullptr : truth_path.c_str());
        st != BT_OK)
      return fail("simulate", st);
    return 0;
  }

  if (track->parsed()) {
    auto cfg = load(config_path);
    if (!cfg)
      return 1;
    bt_track_stats stats{};
    if (bt_status st = bt_track_file(cfg->get(), in_path.c_str(), out_path.c_str(), &stats);
        st != BT_OK)
      return fail("track", st);
    if (stats.lines == 0)
      std::fprintf(stderr, "bletrack track: warning: no reports in %s\n", in_path.c_str());
    if (stats.parse_errors > 0 || stats.unknown_anchor > 0)
      std::fprintf(stderr, "bletrack track: skipped %llu unparseable and %llu unknown-anchor lines\n",
                   static_cast<unsigned long long>(stats.parse_errors),
                   static_cast<unsigned long long>(stats.unknown_anchor));
    std::fprintf(stderr, "bletrack track: %llu lines -> %llu records\n",
                 static_cast<unsigned long long>(stats.lines),
                 static_cast<unsigned long long>(stats.records));
    return 0;
  }

  if (serve->parsed()) {
    auto cfg = load(config_path);
    if (!cfg)
      return 1;
    bt_server* raw = nullptr;
    if (bt_status st = bt_server_start(cfg->get(), listen.empty() ? nullptr : listen.c_str(),
                                       out_path.c_str(), &raw);
        st != BT_OK)
      return fail("serve", st);
    ServerPtr server(raw);
    if (echo)
      bt_server_subscribe(server.get(), print_record, nullptr);
    std::signal(SIGINT, on_signal);
    std::signal(SIGTERM, on_signal);
    std::fprintf(stderr, "bletrack serve: listening on port %d\n", bt_server_port(server.get()));
    while (!g_interrupted) {
      if (idle_exit > 0.0 &&
          bt_server_wait_idle(server.get(), static_cast<int64_t>(idle_exit * 1000), 200) == BT_OK)
        break;
      if (idle_exit <= 0.0)
        bt_server_wait_idle(server.get(), INT64_MAX / 4, 200);
    }
    if (bt_status st = bt_server_stop(server.get()); st != BT_OK)
      return fail("serve", st);
    bt_ingest_stats stats{};
    bt_server_stats(server.get(), &stats);
    std::fprintf(stderr,
                 "bletrack serve: %llu connections, %llu lines, %llu parse errors, %llu late, "
                 "%llu records\n",
                 static_cast<unsigned long long>(stats.connections_total),
                 static_cast<unsigned long long>(stats.lines),
                 static_cast<unsigned long long>(stats.parse_errors),
                 static_cast<unsigned long long>(stats.late_dropped),
                 static_cast<unsigned long long>(stats.records));
    return 0;
  }

  if (analyze->parsed()) {
    auto cfg = load(config_path);
    if (!cfg)
      return 1;
    size_t count = 0;
    if (bt_status st = bt_analyze_file(cfg->get(), in_path.c_str(), out_path.c_str(), &count);
        st != BT_OK)
      return fail("analyze", st);
    std::fprintf(stderr, "bletrack analyze: %zu wandering episode(s)\n", count);
    return 0;
  }

  if (replay->parsed()) {
    if (target.empty() && !config_path.empty()) {
      auto cfg = load(config_path);
      if (!cfg)
        return 1;
      char buf[256];
      if (bt_status st = bt_config_listen_address(cfg->get(), buf, sizeof buf); st != BT_OK)
        return fail("replay", st);
      target = buf;
    }
    const auto colon = target.rfind(':');
    if (colon == std::string::npos) {
      std::fprintf(stderr, "bletrack replay: need --to host:port or --config\n");
      return 1;
    }
    int port = 0;
    try {
      port = std::stoi(target.substr(colon + 1));
    } catch (const std::exception&) {
      std::fprintf(stderr, "bletrack replay: bad port in '%s'\n", target.c_str());
      return 1;
    }
    const std::string host = target.substr(0, colon);
    uint64_t sent = 0;
    if (bt_status st = bt_replay(in_path.c_str(), host.c_str(), port, speed, per_anchor ? 1 : 0, &sent);
        st != BT_OK)
      return fail("replay", st);
    std::fprintf(stderr, "bletrack replay: sent %llu lines\n", static_cast<unsigned long long>(sent));
    return 0;
  }

  if (exporter->parsed()) {
    if (bt_status st = bt_export_file(in_path.c_str(), format.c_str(), out_path.c_str()); st != BT_OK)
      return fail("export", st);
    return 0;
  }
  return 0;
}
