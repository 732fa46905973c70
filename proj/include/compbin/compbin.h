/*
 * Copyright 2026 The CompBin Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

/*
 * compbin: compact binary CSR graph storage with a concurrent block-caching
 * read layer, a partition-loading API, converters, and a userspace-filesystem
 * bridge. This header is the stable C surface of the shared library; handles
 * are opaque, functions return compbin_status, and compbin_last_error() gives
 * the detail text for the calling thread's most recent failure.
 */

#ifndef COMPBIN_COMPBIN_H
#define COMPBIN_COMPBIN_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

/* ---------------------------------------------------------------- status */

typedef enum compbin_status {
  COMPBIN_OK = 0,
  COMPBIN_ERR_INVALID_ARGUMENT = 1,
  COMPBIN_ERR_INVALID_GRAPH = 2,  /* graph-level invariant violated */
  COMPBIN_ERR_BOUNDS = 3,         /* vertex / neighbor / block index range */
  COMPBIN_ERR_OVERFLOW = 4,       /* ID does not fit the byte width */
  COMPBIN_ERR_FORMAT = 5,         /* bad magic/version/length/field */
  COMPBIN_ERR_IO = 6,
  COMPBIN_ERR_PARSE = 7,          /* malformed edge-list input */
  COMPBIN_ERR_RANGE = 8,          /* edge references an out-of-range vertex */
  COMPBIN_ERR_BUSY = 9,
  COMPBIN_ERR_UNSUPPORTED = 10,
  COMPBIN_ERR_FAILED = 11,
} compbin_status;

const char* compbin_status_name(compbin_status status);

/* Detail message for the last failing call on this thread. */
const char* compbin_last_error(void);

void compbin_string_free(char* s);

/* ------------------------------------------------------------ core format */

typedef struct compbin_graph compbin_graph;

typedef struct compbin_header_info {
  uint16_t version;
  uint8_t bytes_per_id;
  uint64_t vertex_count;
  uint64_t edge_count;
} compbin_header_info;

/* ceil(log2(|V|)/8) in exact integer arithmetic, at least 1, at most 8.
 * Returns 0 (with last_error set) when vertex_count is 0. */
uint8_t compbin_bytes_per_id(uint64_t vertex_count);

/* Exact on-storage size of a CompBin file: 24 + 8*(|V|+1) + b*|E|. */
uint64_t compbin_predicted_size(uint64_t vertex_count, uint64_t edge_count, uint8_t bytes_per_id);

compbin_status compbin_graph_open(const char* path, compbin_graph** out);

typedef struct compbin_cache_config {
  uint64_t block_size;     /* power of two >= 4096; default 32 MiB */
  uint64_t memory_budget;  /* >= block_size */
  uint32_t spin_iterations;
} compbin_cache_config;

compbin_cache_config compbin_cache_config_default(void);

/* Opens the graph with all byte access routed through a block cache. */
compbin_status compbin_graph_open_cached(const char* path, const compbin_cache_config* config,
                                         compbin_graph** out);

void compbin_graph_close(compbin_graph* graph);

compbin_status compbin_graph_header(const compbin_graph* graph, compbin_header_info* out);
uint64_t compbin_graph_vertices(const compbin_graph* graph);
uint64_t compbin_graph_edges(const compbin_graph* graph);
uint8_t compbin_graph_id_bytes(const compbin_graph* graph);

compbin_status compbin_graph_degree(const compbin_graph* graph, uint64_t vertex, uint64_t* out);

/* ID of the n-th neighbor of vertex: the b bytes at edge slot offsets[v]+n,
 * least significant byte first. */
compbin_status compbin_graph_neighbor(const compbin_graph* graph, uint64_t vertex, uint64_t n,
                                      uint64_t* out);

typedef struct compbin_cache_counters {
  uint64_t backing_reads;
  uint64_t cache_hits;
  uint64_t wait_events;
  uint64_t evictions;
  uint64_t resident_bytes;
} compbin_cache_counters;

/* Counters of the cache behind a graph opened with open_cached;
 * COMPBIN_ERR_UNSUPPORTED for a direct handle. */
compbin_status compbin_graph_cache_counters(const compbin_graph* graph,
                                            compbin_cache_counters* out);

/* ------------------------------------------------------------ block cache */

typedef struct compbin_cached_file compbin_cached_file;

compbin_status compbin_cache_register(const char* path, const compbin_cache_config* config,
                                      compbin_cached_file** out);

/* Fails with COMPBIN_ERR_BUSY while any block lease is outstanding. On
 * success the handle is freed and must not be used again. */
compbin_status compbin_cache_unregister(compbin_cached_file* file);

uint64_t compbin_cache_file_length(const compbin_cached_file* file);
uint64_t compbin_cache_block_count(const compbin_cached_file* file);

/* Copies min(length, file_length - offset) bytes into dst; *copied gets the
 * count (0 at or past end of file). */
compbin_status compbin_cache_read(compbin_cached_file* file, uint64_t offset, void* dst,
                                  uint64_t length, uint64_t* copied);

/* Read lease on one block: data and size describe the cached buffer, valid
 * until the matching release. Every acquire must be paired with a release. */
compbin_status compbin_cache_acquire(compbin_cached_file* file, uint64_t block_index,
                                     const void** data, uint64_t* size);
compbin_status compbin_cache_release(compbin_cached_file* file, uint64_t block_index);

/* Frees idle blocks, least recently used first, until needed bytes are freed
 * or nothing idle remains. *freed gets the byte count. */
compbin_status compbin_cache_evict(compbin_cached_file* file, uint64_t needed, uint64_t* freed);

compbin_status compbin_cache_file_counters(const compbin_cached_file* file,
                                           compbin_cache_counters* out);

/* ------------------------------------------------------------ fuse bridge */

typedef struct compbin_mount compbin_mount;

/* Exports the files read-only under mountpoint (flat basenames), serving all
 * kernel reads through the block cache. Requires a usable FUSE device. */
compbin_status compbin_mount_create(const char* const* paths, size_t path_count,
                                    const char* mountpoint, const compbin_cache_config* config,
                                    compbin_mount** out);

/* Detaches the filesystem and releases cached memory; counter snapshots stay
 * readable. Unmounting twice is a no-op (*changed = 0). COMPBIN_ERR_BUSY when
 * open handles remain. */
compbin_status compbin_mount_unmount(compbin_mount* mount, int* changed);

/* Live counters while mounted, final snapshot afterwards. name is the
 * exported basename. */
compbin_status compbin_mount_counters(const compbin_mount* mount, const char* name,
                                      compbin_cache_counters* out);

/* 1 while the kernel channel is alive; 0 once unmounted, including when
 * another process unmounted the path. */
int compbin_mount_serving(const compbin_mount* mount);

/* Unmounts and frees the handle. */
void compbin_mount_free(compbin_mount* mount);

/* 1 when this host can create FUSE mounts. */
int compbin_fuse_available(void);

/* Unmounts a path mounted by another process. */
compbin_status compbin_unmount_path(const char* mountpoint);

/* ------------------------------------------------------------ graph loader */

#define COMPBIN_BATCH_CONTINUATION 0x1u /* same vertex continues from the previous call */
#define COMPBIN_BATCH_FAILED 0x2u       /* terminal error notification; empty batch */

/* Delivery callback. neighbors points at a loader-owned buffer of count IDs,
 * valid only during the call. Non-blocking tickets invoke it on a worker
 * thread; calls for one ticket never overlap. */
typedef void (*compbin_edge_callback)(void* user, uint64_t vertex, const uint64_t* neighbors,
                                      uint64_t count, uint32_t flags);

typedef struct compbin_load_options {
  int nonblocking;
  uint64_t buffer_capacity; /* decoded edges per delivery; 0 = default */
} compbin_load_options;

typedef struct compbin_load_ticket compbin_load_ticket;

typedef enum compbin_load_state {
  COMPBIN_LOAD_PENDING = 0,
  COMPBIN_LOAD_DONE = 1,
  COMPBIN_LOAD_FAILED = 2,
} compbin_load_state;

/* Delivers every edge (v, u) with v in [begin, end) exactly once, vertices
 * ascending, neighbors in storage order. Blocking mode returns after the
 * final callback with a completed ticket. */
compbin_status compbin_load_range(compbin_graph* graph, uint64_t begin, uint64_t end,
                                  const compbin_load_options* options,
                                  compbin_edge_callback callback, void* user,
                                  compbin_load_ticket** out_ticket);

compbin_status compbin_load_whole(compbin_graph* graph, const compbin_load_options* options,
                                  compbin_edge_callback callback, void* user,
                                  compbin_load_ticket** out_ticket);

/* Blocks until the ticket settles; idempotent. */
compbin_load_state compbin_load_wait(compbin_load_ticket* ticket);
compbin_load_state compbin_load_state_get(const compbin_load_ticket* ticket);
uint64_t compbin_load_progress(const compbin_load_ticket* ticket); /* edges delivered */
/* Error text of a failed ticket; caller frees with compbin_string_free. */
char* compbin_load_error(const compbin_load_ticket* ticket);
void compbin_load_ticket_free(compbin_load_ticket* ticket);

/* Worker pool size for non-blocking tickets. */
void compbin_loader_set_threads(unsigned threads);

/* -------------------------------------------------------------- converter */

typedef enum compbin_edge_list_format {
  COMPBIN_EDGES_TEXT = 0,  /* "src dst" per line, '#' comments */
  COMPBIN_EDGES_BIN64 = 1, /* little-endian u64 pairs */
} compbin_edge_list_format;

typedef struct compbin_convert_options {
  compbin_edge_list_format format;
  int sort_neighbors;
  uint64_t vertex_count; /* 0 = infer as 1 + max ID seen */
} compbin_convert_options;

compbin_status compbin_convert(const char* in_path, const char* out_path,
                               const compbin_convert_options* options,
                               compbin_header_info* out_header);

typedef struct compbin_verify_report compbin_verify_report;

/* Validates a CompBin file end to end. Validation findings land in the
 * report (report != NULL on COMPBIN_OK); only an unreadable file fails. */
compbin_status compbin_verify(const char* path, compbin_verify_report** out);
size_t compbin_verify_item_count(const compbin_verify_report* report);
uint64_t compbin_verify_item_offset(const compbin_verify_report* report, size_t index);
const char* compbin_verify_item_message(const compbin_verify_report* report, size_t index);
void compbin_verify_report_free(compbin_verify_report* report);

typedef struct compbin_stats_info {
  uint64_t vertices;
  uint64_t edges;
  uint8_t bytes_per_id;
  uint64_t file_bytes;
  uint64_t predicted_bytes;
  uint64_t min_degree;
  uint64_t max_degree;
  double mean_degree;
} compbin_stats_info;

compbin_status compbin_stats(const char* path, compbin_stats_info* out);

/* -------------------------------------------------------------- generator */

typedef struct compbin_generate_options {
  int rmat; /* 0 = uniform, 1 = R-MAT */
  uint64_t vertices;
  uint64_t edges;
  uint64_t seed;
  double a, b, c; /* R-MAT quadrant probabilities; ignored for uniform */
  compbin_edge_list_format format;
} compbin_generate_options;

compbin_generate_options compbin_generate_options_default(void);

/* Seed-deterministic synthetic edge list, consumable by compbin_convert. */
compbin_status compbin_generate(const compbin_generate_options* options, const char* out_path);

/* ---------------------------------------------------------------- bench */

typedef enum compbin_workload_kind {
  COMPBIN_WORKLOAD_SEQUENTIAL_SCAN = 0,
  COMPBIN_WORKLOAD_RANDOM_PARTITION = 1,
  COMPBIN_WORKLOAD_REPEATED_RANDOM_READS = 2,
} compbin_workload_kind;

typedef struct compbin_workload {
  compbin_workload_kind kind;
  const char* path;
  int cache_on;
  compbin_cache_config cache;
  uint32_t repetitions;
  uint64_t seed;
  uint64_t request_size;
  uint32_t threads;
  uint64_t ops; /* reads per repetition for the random-read kind */
} compbin_workload;

typedef struct compbin_metrics {
  double wall_ms_min;
  double wall_ms_median;
  double wall_ms_max;
  uint64_t backing_reads;
  uint64_t cache_hits;
  uint64_t evictions;
  uint64_t bytes_delivered;
} compbin_metrics;

compbin_status compbin_bench_run(const compbin_workload* workload, compbin_metrics* out);

/* Runs the workload and returns the full record (per-repetition metrics
 * included) as a JSON line; caller frees with compbin_string_free. */
compbin_status compbin_bench_run_json(const compbin_workload* workload, char** out_json);

/* Renders record JSON lines (as produced by compbin_bench_run_json) into the
 * CSV report; caller frees with compbin_string_free. */
compbin_status compbin_bench_report_csv(const char* const* json_lines, size_t line_count,
                                        char** out_csv);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* COMPBIN_COMPBIN_H */
