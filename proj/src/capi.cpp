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

#include "compbin/compbin.h"

#include <cstdlib>
#include <cstring>
#include <string>

#include "bench.hpp"
#include "block_cache.hpp"
#include "convert.hpp"
#include "error.hpp"
#include "format.hpp"
#include "fuse_bridge.hpp"
#include "generate.hpp"
#include "loader.hpp"

using namespace compbin;

/* Opaque handle definitions. */
struct compbin_graph {
  Graph graph;
};
struct compbin_cached_file {
  std::shared_ptr<CachedFile> file;
};
struct compbin_mount {
  std::unique_ptr<MountSession> session;
};
struct compbin_load_ticket {
  TicketPtr ticket;
};
struct compbin_verify_report {
  VerifyReport report;
};

namespace {

thread_local std::string g_last_error;

void set_error(const std::string& msg) { g_last_error = msg; }

compbin_status map_errc(Errc code) {
  switch (code) {
    case Errc::invalid_argument: return COMPBIN_ERR_INVALID_ARGUMENT;
    case Errc::invalid_graph: return COMPBIN_ERR_INVALID_GRAPH;
    case Errc::bounds: return COMPBIN_ERR_BOUNDS;
    case Errc::encode_overflow: return COMPBIN_ERR_OVERFLOW;
    case Errc::format: return COMPBIN_ERR_FORMAT;
    case Errc::io: return COMPBIN_ERR_IO;
    case Errc::parse: return COMPBIN_ERR_PARSE;
    case Errc::range: return COMPBIN_ERR_RANGE;
    case Errc::busy: return COMPBIN_ERR_BUSY;
    case Errc::unsupported: return COMPBIN_ERR_UNSUPPORTED;
    case Errc::failed: return COMPBIN_ERR_FAILED;
  }
  return COMPBIN_ERR_FAILED;
}

template <typename F>
compbin_status guarded(F&& f) noexcept {
  try {
    f();
    return COMPBIN_OK;
  } catch (const Error& e) {
    set_error(e.what());
    return map_errc(e.code());
  } catch (const std::exception& e) {
    set_error(e.what());
    return COMPBIN_ERR_FAILED;
  } catch (...) {
    set_error("unknown failure");
    return COMPBIN_ERR_FAILED;
  }
}

compbin_status arg_error(const char* msg) {
  set_error(msg);
  return COMPBIN_ERR_INVALID_ARGUMENT;
}

char* dup_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (out != nullptr) std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

CacheConfig to_cache_config(const compbin_cache_config* config) {
  if (config == nullptr) return CacheConfig{};
  CacheConfig c;
  c.block_size = config->block_size;
  c.memory_budget = config->memory_budget;
  c.spin_iterations = config->spin_iterations;
  return c;
}

void fill_counters(const CacheCounters& in, compbin_cache_counters* out) {
  out->backing_reads = in.backing_reads;
  out->cache_hits = in.cache_hits;
  out->wait_events = in.wait_events;
  out->evictions = in.evictions;
  out->resident_bytes = in.resident_bytes;
}

void fill_header(const GraphHeader& in, compbin_header_info* out) {
  out->version = in.version;
  out->bytes_per_id = in.bytes_per_id;
  out->vertex_count = in.vertex_count;
  out->edge_count = in.edge_count;
}

bench::Workload to_workload(const compbin_workload* w) {
  bench::Workload out;
  switch (w->kind) {
    case COMPBIN_WORKLOAD_SEQUENTIAL_SCAN: out.kind = bench::WorkloadKind::sequential_scan; break;
    case COMPBIN_WORKLOAD_RANDOM_PARTITION: out.kind = bench::WorkloadKind::random_partition; break;
    case COMPBIN_WORKLOAD_REPEATED_RANDOM_READS:
      out.kind = bench::WorkloadKind::repeated_random_reads;
      break;
    default: fail(Errc::invalid_argument, "unknown workload kind");
  }
  out.path = w->path == nullptr ? "" : w->path;
  out.cache_on = w->cache_on != 0;
  out.cache.block_size = w->cache.block_size;
  out.cache.memory_budget = w->cache.memory_budget;
  out.cache.spin_iterations = w->cache.spin_iterations;
  out.repetitions = w->repetitions;
  out.seed = w->seed;
  out.request_size = w->request_size;
  out.threads = w->threads;
  out.ops = w->ops;
  return out;
}

compbin_load_state to_c_state(LoadTicket::State s) {
  switch (s) {
    case LoadTicket::State::pending: return COMPBIN_LOAD_PENDING;
    case LoadTicket::State::done: return COMPBIN_LOAD_DONE;
    case LoadTicket::State::failed: return COMPBIN_LOAD_FAILED;
  }
  return COMPBIN_LOAD_FAILED;
}

void fill_metrics(const bench::RunRecord& r, compbin_metrics* out) {
  out->wall_ms_min = r.wall_ms_min;
  out->wall_ms_median = r.wall_ms_median;
  out->wall_ms_max = r.wall_ms_max;
  out->backing_reads = r.backing_reads;
  out->cache_hits = r.cache_hits;
  out->evictions = r.evictions;
  out->bytes_delivered = r.bytes_delivered;
}

}  // namespace

extern "C" {

const char* compbin_status_name(compbin_status status) {
  switch (status) {
    case COMPBIN_OK: return "ok";
    case COMPBIN_ERR_INVALID_ARGUMENT: return "invalid-argument";
    case COMPBIN_ERR_INVALID_GRAPH: return "invalid-graph";
    case COMPBIN_ERR_BOUNDS: return "bounds";
    case COMPBIN_ERR_OVERFLOW: return "encode-overflow";
    case COMPBIN_ERR_FORMAT: return "format";
    case COMPBIN_ERR_IO: return "io";
    case COMPBIN_ERR_PARSE: return "parse";
    case COMPBIN_ERR_RANGE: return "range";
    case COMPBIN_ERR_BUSY: return "busy";
    case COMPBIN_ERR_UNSUPPORTED: return "unsupported";
    case COMPBIN_ERR_FAILED: return "failed";
  }
  return "unknown";
}

const char* compbin_last_error(void) { return g_last_error.c_str(); }

void compbin_string_free(char* s) { std::free(s); }

/* ------------------------------------------------------------ core format */

uint8_t compbin_bytes_per_id(uint64_t vertex_count) {
  uint8_t result = 0;
  guarded([&] { result = bytes_per_id(vertex_count); });
  return result;
}

uint64_t compbin_predicted_size(uint64_t vertex_count, uint64_t edge_count,
                                uint8_t bytes_per_id_value) {
  return compbin_file_size(vertex_count, edge_count, bytes_per_id_value);
}

compbin_cache_config compbin_cache_config_default(void) {
  CacheConfig defaults;
  compbin_cache_config out;
  out.block_size = defaults.block_size;
  out.memory_budget = defaults.memory_budget;
  out.spin_iterations = defaults.spin_iterations;
  return out;
}

compbin_status compbin_graph_open(const char* path, compbin_graph** out) {
  if (path == nullptr || out == nullptr) return arg_error("path and out must be non-null");
  return guarded([&] { *out = new compbin_graph{Graph::open_file(path)}; });
}

compbin_status compbin_graph_open_cached(const char* path, const compbin_cache_config* config,
                                         compbin_graph** out) {
  if (path == nullptr || out == nullptr) return arg_error("path and out must be non-null");
  return guarded([&] { *out = new compbin_graph{Graph::open_cached(path, to_cache_config(config))}; });
}

void compbin_graph_close(compbin_graph* graph) { delete graph; }

compbin_status compbin_graph_header(const compbin_graph* graph, compbin_header_info* out) {
  if (graph == nullptr || out == nullptr) return arg_error("graph and out must be non-null");
  fill_header(graph->graph.header(), out);
  return COMPBIN_OK;
}

uint64_t compbin_graph_vertices(const compbin_graph* graph) {
  return graph == nullptr ? 0 : graph->graph.vertices();
}

uint64_t compbin_graph_edges(const compbin_graph* graph) {
  return graph == nullptr ? 0 : graph->graph.edges();
}

uint8_t compbin_graph_id_bytes(const compbin_graph* graph) {
  return graph == nullptr ? 0 : static_cast<uint8_t>(graph->graph.id_bytes());
}

compbin_status compbin_graph_degree(const compbin_graph* graph, uint64_t vertex, uint64_t* out) {
  if (graph == nullptr || out == nullptr) return arg_error("graph and out must be non-null");
  return guarded([&] { *out = graph->graph.degree(vertex); });
}

compbin_status compbin_graph_neighbor(const compbin_graph* graph, uint64_t vertex, uint64_t n,
                                      uint64_t* out) {
  if (graph == nullptr || out == nullptr) return arg_error("graph and out must be non-null");
  return guarded([&] { *out = graph->graph.neighbor(vertex, n); });
}

compbin_status compbin_graph_cache_counters(const compbin_graph* graph,
                                            compbin_cache_counters* out) {
  if (graph == nullptr || out == nullptr) return arg_error("graph and out must be non-null");
  return guarded([&] {
    auto source = std::dynamic_pointer_cast<CachedSource>(graph->graph.source());
    if (source == nullptr)
      fail(Errc::unsupported, "graph was not opened through the block cache");
    fill_counters(source->file()->counters(), out);
  });
}

/* ------------------------------------------------------------ block cache */

compbin_status compbin_cache_register(const char* path, const compbin_cache_config* config,
                                      compbin_cached_file** out) {
  if (path == nullptr || out == nullptr) return arg_error("path and out must be non-null");
  return guarded([&] {
    *out = new compbin_cached_file{CachedFile::open(path, to_cache_config(config))};
  });
}

compbin_status compbin_cache_unregister(compbin_cached_file* file) {
  if (file == nullptr) return arg_error("file must be non-null");
  compbin_status rc = guarded([&] { file->file->unregister(); });
  if (rc == COMPBIN_OK) delete file;
  return rc;
}

uint64_t compbin_cache_file_length(const compbin_cached_file* file) {
  return file == nullptr ? 0 : file->file->length();
}

uint64_t compbin_cache_block_count(const compbin_cached_file* file) {
  return file == nullptr ? 0 : file->file->block_count();
}

compbin_status compbin_cache_read(compbin_cached_file* file, uint64_t offset, void* dst,
                                  uint64_t length, uint64_t* copied) {
  if (file == nullptr || (dst == nullptr && length > 0))
    return arg_error("file and dst must be non-null");
  return guarded([&] {
    uint64_t n = file->file->read(offset, {static_cast<std::byte*>(dst), length});
    if (copied != nullptr) *copied = n;
  });
}

compbin_status compbin_cache_acquire(compbin_cached_file* file, uint64_t block_index,
                                     const void** data, uint64_t* size) {
  if (file == nullptr || data == nullptr) return arg_error("file and data must be non-null");
  return guarded([&] {
    CachedFile::Lease lease = file->file->acquire(block_index);
    *data = lease.data();
    if (size != nullptr) *size = lease.size();
    // The C caller owns the lease now and must pair it with a release call.
    lease.detach();
  });
}

compbin_status compbin_cache_release(compbin_cached_file* file, uint64_t block_index) {
  if (file == nullptr) return arg_error("file must be non-null");
  return guarded([&] { file->file->release(block_index); });
}

compbin_status compbin_cache_evict(compbin_cached_file* file, uint64_t needed, uint64_t* freed) {
  if (file == nullptr) return arg_error("file must be non-null");
  return guarded([&] {
    uint64_t n = file->file->evict(needed);
    if (freed != nullptr) *freed = n;
  });
}

compbin_status compbin_cache_file_counters(const compbin_cached_file* file,
                                           compbin_cache_counters* out) {
  if (file == nullptr || out == nullptr) return arg_error("file and out must be non-null");
  fill_counters(file->file->counters(), out);
  return COMPBIN_OK;
}

/* ------------------------------------------------------------ fuse bridge */

compbin_status compbin_mount_create(const char* const* paths, size_t path_count,
                                    const char* mountpoint, const compbin_cache_config* config,
                                    compbin_mount** out) {
  if (paths == nullptr || mountpoint == nullptr || out == nullptr)
    return arg_error("paths, mountpoint, and out must be non-null");
  return guarded([&] {
    std::vector<std::string> files(paths, paths + path_count);
    MountConfig mc;
    mc.cache = to_cache_config(config);
    *out = new compbin_mount{MountSession::mount(files, mountpoint, mc)};
  });
}

compbin_status compbin_mount_unmount(compbin_mount* mount, int* changed) {
  if (mount == nullptr) return arg_error("mount must be non-null");
  return guarded([&] {
    bool did = mount->session->unmount();
    if (changed != nullptr) *changed = did ? 1 : 0;
  });
}

compbin_status compbin_mount_counters(const compbin_mount* mount, const char* name,
                                      compbin_cache_counters* out) {
  if (mount == nullptr || name == nullptr || out == nullptr)
    return arg_error("mount, name, and out must be non-null");
  return guarded([&] { fill_counters(mount->session->counters(name), out); });
}

int compbin_mount_serving(const compbin_mount* mount) {
  return (mount != nullptr && mount->session->serving()) ? 1 : 0;
}

void compbin_mount_free(compbin_mount* mount) { delete mount; }

int compbin_fuse_available(void) { return fuse_available() ? 1 : 0; }

compbin_status compbin_unmount_path(const char* mountpoint) {
  if (mountpoint == nullptr) return arg_error("mountpoint must be non-null");
  return guarded([&] { unmount_path(mountpoint); });
}

/* ------------------------------------------------------------ graph loader */

compbin_status compbin_load_range(compbin_graph* graph, uint64_t begin, uint64_t end,
                                  const compbin_load_options* options,
                                  compbin_edge_callback callback, void* user,
                                  compbin_load_ticket** out_ticket) {
  if (graph == nullptr || callback == nullptr || out_ticket == nullptr)
    return arg_error("graph, callback, and out_ticket must be non-null");
  return guarded([&] {
    LoadOptions opts;
    if (options != nullptr) {
      opts.nonblocking = options->nonblocking != 0;
      if (options->buffer_capacity > 0) opts.buffer_capacity = options->buffer_capacity;
    }
    TicketPtr ticket = Loader::load_range(
        graph->graph, begin, end, opts,
        [callback, user](uint64_t vertex, std::span<const uint64_t> ids, uint32_t flags) {
          callback(user, vertex, ids.data(), ids.size(), flags);
        });
    *out_ticket = new compbin_load_ticket{std::move(ticket)};
  });
}

compbin_status compbin_load_whole(compbin_graph* graph, const compbin_load_options* options,
                                  compbin_edge_callback callback, void* user,
                                  compbin_load_ticket** out_ticket) {
  if (graph == nullptr) return arg_error("graph must be non-null");
  return compbin_load_range(graph, 0, graph->graph.vertices(), options, callback, user,
                            out_ticket);
}

compbin_load_state compbin_load_wait(compbin_load_ticket* ticket) {
  if (ticket == nullptr) return COMPBIN_LOAD_FAILED;
  return to_c_state(ticket->ticket->wait());
}

compbin_load_state compbin_load_state_get(const compbin_load_ticket* ticket) {
  if (ticket == nullptr) return COMPBIN_LOAD_FAILED;
  return to_c_state(ticket->ticket->state());
}

uint64_t compbin_load_progress(const compbin_load_ticket* ticket) {
  return ticket == nullptr ? 0 : ticket->ticket->progress();
}

char* compbin_load_error(const compbin_load_ticket* ticket) {
  return ticket == nullptr ? nullptr : dup_string(ticket->ticket->error());
}

void compbin_load_ticket_free(compbin_load_ticket* ticket) { delete ticket; }

void compbin_loader_set_threads(unsigned threads) { Loader::set_pool_size(threads); }

/* -------------------------------------------------------------- converter */

compbin_status compbin_convert(const char* in_path, const char* out_path,
                               const compbin_convert_options* options,
                               compbin_header_info* out_header) {
  if (in_path == nullptr || out_path == nullptr)
    return arg_error("in_path and out_path must be non-null");
  return guarded([&] {
    ConvertOptions opts;
    if (options != nullptr) {
      opts.format = options->format == COMPBIN_EDGES_BIN64 ? EdgeListFormat::bin64
                                                           : EdgeListFormat::text;
      opts.sort_neighbors = options->sort_neighbors != 0;
      if (options->vertex_count > 0) opts.vertex_count = options->vertex_count;
    }
    GraphHeader header = convert(in_path, out_path, opts);
    if (out_header != nullptr) fill_header(header, out_header);
  });
}

compbin_status compbin_verify(const char* path, compbin_verify_report** out) {
  if (path == nullptr || out == nullptr) return arg_error("path and out must be non-null");
  return guarded([&] { *out = new compbin_verify_report{verify_file(path)}; });
}

size_t compbin_verify_item_count(const compbin_verify_report* report) {
  return report == nullptr ? 0 : report->report.items.size();
}

uint64_t compbin_verify_item_offset(const compbin_verify_report* report, size_t index) {
  if (report == nullptr || index >= report->report.items.size()) return 0;
  return report->report.items[index].byte_offset;
}

const char* compbin_verify_item_message(const compbin_verify_report* report, size_t index) {
  if (report == nullptr || index >= report->report.items.size()) return nullptr;
  return report->report.items[index].message.c_str();
}

void compbin_verify_report_free(compbin_verify_report* report) { delete report; }

compbin_status compbin_stats(const char* path, compbin_stats_info* out) {
  if (path == nullptr || out == nullptr) return arg_error("path and out must be non-null");
  return guarded([&] {
    StatsSummary s = stats_file(path);
    out->vertices = s.vertices;
    out->edges = s.edges;
    out->bytes_per_id = s.bytes_per_id;
    out->file_bytes = s.file_bytes;
    out->predicted_bytes = s.predicted_bytes;
    out->min_degree = s.min_degree;
    out->max_degree = s.max_degree;
    out->mean_degree = s.mean_degree;
  });
}

/* -------------------------------------------------------------- generator */

compbin_generate_options compbin_generate_options_default(void) {
  GenerateOptions defaults;
  compbin_generate_options out;
  out.rmat = 0;
  out.vertices = defaults.vertices;
  out.edges = defaults.edges;
  out.seed = defaults.seed;
  out.a = defaults.a;
  out.b = defaults.b;
  out.c = defaults.c;
  out.format = COMPBIN_EDGES_TEXT;
  return out;
}

compbin_status compbin_generate(const compbin_generate_options* options, const char* out_path) {
  if (options == nullptr || out_path == nullptr)
    return arg_error("options and out_path must be non-null");
  return guarded([&] {
    GenerateOptions opts;
    opts.model = options->rmat != 0 ? GenerateOptions::Model::rmat : GenerateOptions::Model::uniform;
    opts.vertices = options->vertices;
    opts.edges = options->edges;
    opts.seed = options->seed;
    opts.a = options->a;
    opts.b = options->b;
    opts.c = options->c;
    opts.format =
        options->format == COMPBIN_EDGES_BIN64 ? EdgeListFormat::bin64 : EdgeListFormat::text;
    generate_file(opts, out_path);
  });
}

/* ---------------------------------------------------------------- bench */

compbin_status compbin_bench_run(const compbin_workload* workload, compbin_metrics* out) {
  if (workload == nullptr || out == nullptr)
    return arg_error("workload and out must be non-null");
  return guarded([&] { fill_metrics(bench::run(to_workload(workload)), out); });
}

compbin_status compbin_bench_run_json(const compbin_workload* workload, char** out_json) {
  if (workload == nullptr || out_json == nullptr)
    return arg_error("workload and out_json must be non-null");
  return guarded([&] {
    *out_json = dup_string(bench::record_to_json(bench::run(to_workload(workload))));
  });
}

compbin_status compbin_bench_report_csv(const char* const* json_lines, size_t line_count,
                                        char** out_csv) {
  if (json_lines == nullptr || out_csv == nullptr)
    return arg_error("json_lines and out_csv must be non-null");
  return guarded([&] {
    std::vector<bench::RunRecord> records;
    for (size_t i = 0; i < line_count; ++i)
      records.push_back(bench::record_from_json(json_lines[i]));
    *out_csv = dup_string(bench::report_csv(records));
  });
}

} /* extern "C" */
