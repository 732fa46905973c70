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

#include "bench.hpp"

#include <fcntl.h>
#include <unistd.h>

#include <algorithm>
#include <atomic>
#include <cerrno>
#include <chrono>
#include <cstring>
#include <memory>
#include <optional>
#include <sstream>
#include <thread>

#include <nlohmann/json.hpp>

#include "error.hpp"
#include "format.hpp"
#include "loader.hpp"
#include "rng.hpp"

namespace compbin::bench {

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point start) {
  return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

// The cache-off arm: positioned reads straight at the backing file, one call
// per request, counted.
class DirectFile {
 public:
  explicit DirectFile(const std::string& path) : path_(path) {
    fd_ = ::open(path.c_str(), O_RDONLY);
    if (fd_ < 0) fail(Errc::io, "cannot open '" + path + "': " + std::strerror(errno));
    off_t end = ::lseek(fd_, 0, SEEK_END);
    length_ = end < 0 ? 0 : static_cast<uint64_t>(end);
  }
  ~DirectFile() {
    if (fd_ >= 0) ::close(fd_);
  }
  uint64_t length() const { return length_; }
  uint64_t calls() const { return calls_.load(std::memory_order_relaxed); }

  uint64_t read(uint64_t offset, std::span<std::byte> dst) {
    calls_.fetch_add(1, std::memory_order_relaxed);
    if (offset >= length_) return 0;
    uint64_t want = std::min<uint64_t>(dst.size(), length_ - offset);
    uint64_t got = 0;
    while (got < want) {
      ssize_t n = ::pread(fd_, dst.data() + got, want - got, static_cast<off_t>(offset + got));
      if (n < 0) {
        if (errno == EINTR) continue;
        fail(Errc::io, "read of '" + path_ + "' failed: " + std::strerror(errno));
      }
      if (n == 0) break;
      got += static_cast<uint64_t>(n);
    }
    return got;
  }

 private:
  std::string path_;
  int fd_ = -1;
  uint64_t length_ = 0;
  std::atomic<uint64_t> calls_{0};
};

struct RepContext {
  std::shared_ptr<CachedFile> cached;  // null when cache off
  DirectFile* direct = nullptr;
  uint64_t read(uint64_t offset, std::span<std::byte> dst) {
    return cached ? cached->read(offset, dst) : direct->read(offset, dst);
  }
  uint64_t length() const { return cached ? cached->length() : direct->length(); }
};

uint64_t scan_shard(RepContext& ctx, uint64_t begin, uint64_t end, uint64_t request_size,
                    std::vector<std::byte>& buf) {
  uint64_t delivered = 0;
  for (uint64_t pos = begin; pos < end; pos += request_size) {
    const uint64_t want = std::min(request_size, end - pos);
    delivered += ctx.read(pos, {buf.data(), want});
  }
  return delivered;
}

uint64_t run_sequential_scan(RepContext& ctx, const Workload& w) {
  const uint64_t len = ctx.length();
  if (w.threads <= 1) {
    std::vector<std::byte> buf(w.request_size);
    return scan_shard(ctx, 0, len, w.request_size, buf);
  }
  // Contiguous shards, one per thread, each scanned at request granularity.
  std::atomic<uint64_t> total{0};
  std::vector<std::thread> threads;
  const uint64_t shard = (len + w.threads - 1) / w.threads;
  for (uint32_t t = 0; t < w.threads; ++t) {
    threads.emplace_back([&, t] {
      const uint64_t begin = std::min<uint64_t>(len, t * shard);
      const uint64_t end = std::min<uint64_t>(len, begin + shard);
      std::vector<std::byte> buf(w.request_size);
      total.fetch_add(scan_shard(ctx, begin, end, w.request_size, buf),
                      std::memory_order_relaxed);
    });
  }
  for (auto& th : threads) th.join();
  return total.load();
}

uint64_t run_random_reads(RepContext& ctx, const Workload& w) {
  const uint64_t len = ctx.length();
  if (len == 0) return 0;
  std::atomic<uint64_t> total{0};
  auto worker = [&](uint32_t thread_index) {
    // Re-seeded per repetition and per thread: the trace is a pure function
    // of (seed, thread).
    SplitMix64 rng(w.seed ^ (0x9e3779b97f4a7c15ull * (thread_index + 1)));
    std::vector<std::byte> buf(w.request_size);
    uint64_t delivered = 0;
    const uint64_t span = len > w.request_size ? len - w.request_size + 1 : 1;
    for (uint64_t i = 0; i < w.ops; ++i)
      delivered += ctx.read(rng.bounded(span), {buf.data(), w.request_size});
    total.fetch_add(delivered, std::memory_order_relaxed);
  };
  if (w.threads <= 1) {
    worker(0);
  } else {
    std::vector<std::thread> threads;
    for (uint32_t t = 0; t < w.threads; ++t) threads.emplace_back(worker, t);
    for (auto& th : threads) th.join();
  }
  return total.load();
}

uint64_t run_random_partition(const Graph& graph, const Workload& w) {
  // Split [0, |V|) at seeded random boundaries, one range per thread, and
  // load them as concurrent tickets.
  SplitMix64 rng(w.seed);
  const uint64_t v = graph.vertices();
  std::vector<uint64_t> bounds{0, v};
  const uint32_t ranges = std::max(1u, w.threads);
  for (uint32_t i = 1; i < ranges; ++i) bounds.push_back(rng.bounded(v + 1));
  std::sort(bounds.begin(), bounds.end());

  std::vector<std::shared_ptr<std::atomic<uint64_t>>> counts;
  std::vector<TicketPtr> tickets;
  for (size_t i = 0; i + 1 < bounds.size(); ++i) {
    auto count = std::make_shared<std::atomic<uint64_t>>(0);
    counts.push_back(count);
    LoadOptions opts;
    opts.nonblocking = true;
    tickets.push_back(Loader::load_range(
        graph, bounds[i], bounds[i + 1], opts,
        [count](uint64_t, std::span<const uint64_t> ids, uint32_t flags) {
          if ((flags & kBatchFailed) == 0)
            count->fetch_add(ids.size(), std::memory_order_relaxed);
        }));
  }
  uint64_t edges = 0;
  for (size_t i = 0; i < tickets.size(); ++i) {
    if (tickets[i]->wait() == LoadTicket::State::failed)
      fail(Errc::io, "partition load failed: " + tickets[i]->error());
    edges += counts[i]->load();
  }
  return edges * 8;  // bytes handed to callbacks as decoded 64-bit IDs
}

}  // namespace

const char* workload_kind_name(WorkloadKind kind) {
  switch (kind) {
    case WorkloadKind::sequential_scan: return "sequential-scan";
    case WorkloadKind::random_partition: return "random-partition";
    case WorkloadKind::repeated_random_reads: return "repeated-random-reads";
  }
  return "unknown";
}

RunRecord run(const Workload& workload) {
  if (workload.repetitions < 1) fail(Errc::invalid_argument, "repetitions must be >= 1");
  if (workload.request_size == 0) fail(Errc::invalid_argument, "request_size must be >= 1");

  RunRecord record;
  record.workload = workload;

  std::shared_ptr<CachedFile> cached;
  std::unique_ptr<DirectFile> direct;
  std::optional<Graph> graph;
  const bool partition = workload.kind == WorkloadKind::random_partition;
  if (workload.cache_on) {
    if (partition)
      graph = Graph::open_cached(workload.path, workload.cache);
    else
      cached = CachedFile::open(workload.path, workload.cache);
  } else {
    if (partition)
      graph = Graph::open_file(workload.path);
    else
      direct = std::make_unique<DirectFile>(workload.path);
  }
  if (partition && workload.cache_on) {
    auto src = std::dynamic_pointer_cast<CachedSource>(graph->source());
    cached = src->file();
  }

  auto counters_now = [&]() -> CacheCounters {
    if (cached) return cached->counters();
    CacheCounters c;
    if (direct) c.backing_reads = direct->calls();
    return c;
  };

  CacheCounters prev = counters_now();
  for (uint32_t rep = 0; rep < workload.repetitions; ++rep) {
    RepContext ctx{cached, direct.get()};
    const auto start = Clock::now();
    uint64_t delivered = 0;
    switch (workload.kind) {
      case WorkloadKind::sequential_scan:
        delivered = run_sequential_scan(ctx, workload);
        break;
      case WorkloadKind::repeated_random_reads:
        delivered = run_random_reads(ctx, workload);
        break;
      case WorkloadKind::random_partition:
        delivered = run_random_partition(*graph, workload);
        break;
    }
    RepMetrics m;
    m.wall_ms = ms_since(start);
    const CacheCounters now = counters_now();
    m.backing_reads = now.backing_reads - prev.backing_reads;
    m.cache_hits = now.cache_hits - prev.cache_hits;
    m.evictions = now.evictions - prev.evictions;
    m.bytes_delivered = delivered;
    prev = now;
    record.reps.push_back(m);
  }

  std::vector<double> walls;
  for (const RepMetrics& m : record.reps) {
    walls.push_back(m.wall_ms);
    record.backing_reads += m.backing_reads;
    record.cache_hits += m.cache_hits;
    record.evictions += m.evictions;
    record.bytes_delivered += m.bytes_delivered;
  }
  std::sort(walls.begin(), walls.end());
  record.wall_ms_min = walls.front();
  record.wall_ms_max = walls.back();
  record.wall_ms_median = walls[walls.size() / 2];
  return record;
}

namespace {

bool same_shape(const Workload& a, const Workload& b) {
  return a.kind == b.kind && a.path == b.path && a.repetitions == b.repetitions &&
         a.request_size == b.request_size && a.threads == b.threads && a.ops == b.ops;
}

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.3f", v);
  return buf;
}

}  // namespace

std::string report_csv(std::span<const RunRecord> records) {
  std::ostringstream out;
  out << "workload,cache,block_size,budget,reps,wall_ms_median,backing_reads,cache_hits,"
         "evictions,speedup_vs_baseline\n";
  for (const RunRecord& r : records) {
    const Workload& w = r.workload;
    std::string speedup;
    if (w.cache_on) {
      for (const RunRecord& base : records) {
        if (!base.workload.cache_on && same_shape(w, base.workload)) {
          if (r.wall_ms_median > 0.0)
            speedup = format_double(base.wall_ms_median / r.wall_ms_median);
          break;
        }
      }
    }
    out << workload_kind_name(w.kind) << ',' << (w.cache_on ? "on" : "off") << ','
        << (w.cache_on ? w.cache.block_size : 0) << ','
        << (w.cache_on ? w.cache.memory_budget : 0) << ',' << w.repetitions << ','
        << format_double(r.wall_ms_median) << ',' << r.backing_reads << ',' << r.cache_hits << ','
        << r.evictions << ',' << speedup << '\n';
  }
  return out.str();
}

std::string record_to_json(const RunRecord& record) {
  nlohmann::json j;
  const Workload& w = record.workload;
  j["workload"] = {{"kind", workload_kind_name(w.kind)},
                   {"path", w.path},
                   {"cache", w.cache_on},
                   {"block_size", w.cache.block_size},
                   {"budget", w.cache.memory_budget},
                   {"spin_iterations", w.cache.spin_iterations},
                   {"repetitions", w.repetitions},
                   {"seed", w.seed},
                   {"request_size", w.request_size},
                   {"threads", w.threads},
                   {"ops", w.ops}};
  j["wall_ms_min"] = record.wall_ms_min;
  j["wall_ms_median"] = record.wall_ms_median;
  j["wall_ms_max"] = record.wall_ms_max;
  j["backing_reads"] = record.backing_reads;
  j["cache_hits"] = record.cache_hits;
  j["evictions"] = record.evictions;
  j["bytes_delivered"] = record.bytes_delivered;
  nlohmann::json reps = nlohmann::json::array();
  for (const RepMetrics& m : record.reps)
    reps.push_back({{"wall_ms", m.wall_ms},
                    {"backing_reads", m.backing_reads},
                    {"cache_hits", m.cache_hits},
                    {"evictions", m.evictions},
                    {"bytes_delivered", m.bytes_delivered}});
  j["reps"] = reps;
  return j.dump();
}

RunRecord record_from_json(const std::string& json_line) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(json_line);
  } catch (const nlohmann::json::exception& e) {
    fail(Errc::parse, std::string("bad record line: ") + e.what());
  }
  try {
    RunRecord r;
    const auto& w = j.at("workload");
    const std::string kind = w.at("kind").get<std::string>();
    if (kind == "sequential-scan")
      r.workload.kind = WorkloadKind::sequential_scan;
    else if (kind == "random-partition")
      r.workload.kind = WorkloadKind::random_partition;
    else if (kind == "repeated-random-reads")
      r.workload.kind = WorkloadKind::repeated_random_reads;
    else
      fail(Errc::parse, "unknown workload kind '" + kind + "'");
    r.workload.path = w.at("path").get<std::string>();
    r.workload.cache_on = w.at("cache").get<bool>();
    r.workload.cache.block_size = w.at("block_size").get<uint64_t>();
    r.workload.cache.memory_budget = w.at("budget").get<uint64_t>();
    r.workload.cache.spin_iterations = w.at("spin_iterations").get<uint32_t>();
    r.workload.repetitions = w.at("repetitions").get<uint32_t>();
    r.workload.seed = w.at("seed").get<uint64_t>();
    r.workload.request_size = w.at("request_size").get<uint64_t>();
    r.workload.threads = w.at("threads").get<uint32_t>();
    r.workload.ops = w.at("ops").get<uint64_t>();
    r.wall_ms_min = j.at("wall_ms_min").get<double>();
    r.wall_ms_median = j.at("wall_ms_median").get<double>();
    r.wall_ms_max = j.at("wall_ms_max").get<double>();
    r.backing_reads = j.at("backing_reads").get<uint64_t>();
    r.cache_hits = j.at("cache_hits").get<uint64_t>();
    r.evictions = j.at("evictions").get<uint64_t>();
    for (const auto& rep : j.at("reps")) {
      RepMetrics m;
      m.wall_ms = rep.at("wall_ms").get<double>();
      m.backing_reads = rep.at("backing_reads").get<uint64_t>();
      m.cache_hits = rep.at("cache_hits").get<uint64_t>();
      m.evictions = rep.at("evictions").get<uint64_t>();
      m.bytes_delivered = rep.at("bytes_delivered").get<uint64_t>();
      r.reps.push_back(m);
    }
    r.bytes_delivered = j.at("bytes_delivered").get<uint64_t>();
    return r;
  } catch (const nlohmann::json::exception& e) {
    fail(Errc::parse, std::string("bad record line: ") + e.what());
  }
}

}  // namespace compbin::bench
