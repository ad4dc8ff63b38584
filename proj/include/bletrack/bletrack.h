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
#ifndef BLETRACK_H
#define BLETRACK_H

/*
 * C interface to the bletrack library.
 *
 * All functions return a bt_status. On failure, bt_last_error() returns a
 * message describing the most recent failure on the calling thread. Handles
 * are opaque and owned by the caller; release them with the matching
 * *_free function. Handles are not thread-safe unless stated otherwise.
 */

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  if defined(BLETRACK_BUILDING_LIBRARY)
#    define BT_API __declspec(dllexport)
#  else
#    define BT_API __declspec(dllimport)
#  endif
#else
#  define BT_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum bt_status {
  BT_OK = 0,
  BT_ERR_ARGUMENT = 1,    /* null handle or bad argument */
  BT_ERR_CONFIG = 2,      /* configuration failed validation */
  BT_ERR_SCENARIO = 3,    /* scenario missing or invalid */
  BT_ERR_MALFORMED = 4,   /* wire line or log row does not parse */
  BT_ERR_INVALID = 5,     /* parsed but violates a value constraint */
  BT_ERR_VERSION = 6,     /* unsupported wire format version */
  BT_ERR_IO = 7,
  BT_ERR_BIND = 8,
  BT_ERR_NETWORK = 9,
  BT_ERR_EMPTY = 10,      /* nothing to return */
  BT_ERR_INTERNAL = 99
} bt_status;

typedef struct bt_config bt_config;
typedef struct bt_tracker bt_tracker;
typedef struct bt_server bt_server;

#define BT_ID_CAPACITY 64

typedef struct bt_raw_report {
  char anchor_id[BT_ID_CAPACITY];
  int32_t receiver_index;
  char tag_id[BT_ID_CAPACITY];
  double rssi_dbm;
  int64_t timestamp_ms;
} bt_raw_report;

typedef struct bt_log_record {
  char tag_id[BT_ID_CAPACITY];
  int64_t t_ms;
  double x_m;
  double y_m;
  double vx_mps;
  double vy_mps;
  double p_trace;
  int32_t n_anchors_used;
  int32_t coast;
} bt_log_record;

typedef struct bt_track_stats {
  uint64_t lines;
  uint64_t parse_errors;
  uint64_t unknown_anchor;
  uint64_t records;
} bt_track_stats;

typedef struct bt_ingest_stats {
  uint64_t connections_total;
  uint64_t connections_open;
  uint64_t lines;
  uint64_t parse_errors;
  uint64_t late_dropped;
  uint64_t unknown_anchor;
  uint64_t records;
} bt_ingest_stats;

typedef void (*bt_record_callback)(const bt_log_record* record, void* user);

BT_API const char* bt_version(void);
BT_API const char* bt_last_error(void);
BT_API const char* bt_status_name(bt_status status);

/* Configuration */
BT_API bt_status bt_config_load(const char* path, bt_config** out);
BT_API bt_status bt_config_parse(const char* json_text, bt_config** out);
BT_API void bt_config_free(bt_config* config);
BT_API size_t bt_config_anchor_count(const bt_config* config);
BT_API int bt_config_has_scenario(const bt_config* config);
/* Copies the configured listen address ("host:port") into buf. */
BT_API bt_status bt_config_listen_address(const bt_config* config, char* buf, size_t len);

/* Wire format */
BT_API bt_status bt_parse_report(const char* line, size_t len, bt_raw_report* out);
/* Writes the canonical line (no newline, NUL-terminated) into buf. */
BT_API bt_status bt_format_report(const bt_raw_report* report, char* buf, size_t len);

/*
 * Simulation. Writes wire lines to reports_path and, if truth_path is not
 * NULL, ground truth CSV (tag_id,t_ms,x_m,y_m). seed_override may be NULL to
 * use the scenario's seed.
 */
BT_API bt_status bt_simulate(const bt_config* config, const uint64_t* seed_override,
                             const char* reports_path, const char* truth_path);

/* Batch tracking: wire lines file -> trajectory log CSV. stats may be NULL. */
BT_API bt_status bt_track_file(const bt_config* config, const char* reports_path,
                               const char* log_path, bt_track_stats* stats);

/* Trajectory log -> episode report CSV. episode_count may be NULL. */
BT_API bt_status bt_analyze_file(const bt_config* config, const char* log_path,
                                 const char* report_path, size_t* episode_count);

/* Trajectory log -> "csv" or "geojson". */
BT_API bt_status bt_export_file(const char* log_path, const char* format, const char* out_path);

/*
 * Streaming tracker. Push wire lines as they arrive; completed records are
 * queued and read with bt_tracker_pop. reorder_watermark_ms < 0 disables
 * late-report dropping.
 */
BT_API bt_status bt_tracker_create(const bt_config* config, int64_t reorder_watermark_ms,
                                   bt_tracker** out);
BT_API void bt_tracker_free(bt_tracker* tracker);
BT_API bt_status bt_tracker_push_line(bt_tracker* tracker, const char* line, size_t len);
BT_API bt_status bt_tracker_flush(bt_tracker* tracker);
/* BT_ERR_EMPTY when no record is queued. */
BT_API bt_status bt_tracker_pop(bt_tracker* tracker, bt_log_record* out);
BT_API size_t bt_tracker_pending(const bt_tracker* tracker);
BT_API uint64_t bt_tracker_late_dropped(const bt_tracker* tracker);

/*
 * Live ingest server. listen may be NULL to use the configured address;
 * log_path may be NULL. The server handle is thread-safe.
 */
BT_API bt_status bt_server_start(const bt_config* config, const char* listen,
                                 const char* log_path, bt_server** out);
BT_API int bt_server_port(const bt_server* server);
BT_API bt_status bt_server_subscribe(bt_server* server, bt_record_callback callback, void* user);
BT_API bt_status bt_server_stats(const bt_server* server, bt_ingest_stats* out);
/* Returns BT_OK once idle, BT_ERR_EMPTY on timeout. */
BT_API bt_status bt_server_wait_idle(bt_server* server, int64_t idle_ms, int64_t timeout_ms);
BT_API bt_status bt_server_stop(bt_server* server);
BT_API void bt_server_free(bt_server* server);

/* Sends a wire-line file to host:port. speed <= 0 sends without pacing. */
BT_API bt_status bt_replay(const char* reports_path, const char* host, int port, double speed,
                           int per_anchor_connections, uint64_t* lines_sent);

#ifdef __cplusplus
}
#endif

#endif /* BLETRACK_H */
