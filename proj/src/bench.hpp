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

#ifndef COMPBIN_BENCH_HPP
#define COMPBIN_BENCH_HPP

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "block_cache.hpp"

namespace compbin::bench {

enum class WorkloadKind { sequential_scan, random_partition, repeated_random_reads };

const char* workload_kind_name(WorkloadKind kind);

struct Workload {
  WorkloadKind kind = WorkloadKind::sequential_scan;
  std::string path;                  // CompBin file (or any file for scan kinds)
  bool cache_on = true;
  CacheConfig cache;
  uint32_t repetitions = 1;
  uint64_t seed = 0;
  uint64_t request_size = 128 * 1024;  // caller-visible read granularity
  uint32_t threads = 1;
  uint64_t ops = 1000;                 // reads per repetition (random-read kind)
};

struct RepMetrics {
  double wall_ms = 0.0;
  uint64_t backing_reads = 0;
  uint64_t cache_hits = 0;
  uint64_t evictions = 0;
  uint64_t bytes_delivered = 0;
};

struct RunRecord {
  Workload workload;
  std::vector<RepMetrics> reps;
  double wall_ms_min = 0.0;
  double wall_ms_median = 0.0;
  double wall_ms_max = 0.0;
  uint64_t backing_reads = 0;
  uint64_t cache_hits = 0;
  uint64_t evictions = 0;
  uint64_t bytes_delivered = 0;
};

/// Executes the workload. The seed fully determines the access sequence, so
/// counters are reproducible; wall times are informational only. With the
/// cache off, reads go straight to the backing file at the request
/// granularity and backing_reads counts those calls.
RunRecord run(const Workload& workload);

/// One CSV row per record, stable column order:
/// workload,cache,block_size,budget,reps,wall_ms_median,backing_reads,
/// cache_hits,evictions,speedup_vs_baseline. A cache-on record gets a speedup
/// (baseline median / its median) when a cache-off record with the same
/// workload shape is present; the column is blank otherwise.
std::string report_csv(std::span<const RunRecord> records);

std::string record_to_json(const RunRecord& record);
RunRecord record_from_json(const std::string& json_line);

}  // namespace compbin::bench

#endif  // COMPBIN_BENCH_HPP
