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

// compbin-bench: generate synthetic graphs, run read workloads with and
// without the block cache, and render collected records as CSV.
//
//   compbin-bench generate --model rmat --vertices 65536 --edges 1048576 out.txt
//   compbin-bench run --workload seq --file g.compbin --cache on --records r.jsonl
//   compbin-bench report --records r.jsonl

#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "compbin/compbin.h"

namespace {

int fail_with(compbin_status status) {
  std::fprintf(stderr, "error (%s): %s\n", compbin_status_name(status), compbin_last_error());
  return 1;
}

int run_generate(const std::string& out, const std::string& model, uint64_t vertices,
                 uint64_t edges, uint64_t seed, const std::string& format) {
  compbin_generate_options opts = compbin_generate_options_default();
  opts.rmat = model == "rmat" ? 1 : 0;
  opts.vertices = vertices;
  opts.edges = edges;
  opts.seed = seed;
  opts.format = format == "bin64" ? COMPBIN_EDGES_BIN64 : COMPBIN_EDGES_TEXT;
  compbin_status rc = compbin_generate(&opts, out.c_str());
  if (rc != COMPBIN_OK) return fail_with(rc);
  std::fprintf(stderr, "wrote %s (%llu edges, model %s, seed %llu)\n", out.c_str(),
               static_cast<unsigned long long>(edges), model.c_str(),
               static_cast<unsigned long long>(seed));
  return 0;
}

int run_workload(const std::string& file, const std::string& workload, bool cache_on,
                 uint64_t block_size, uint64_t budget, uint32_t reps, uint64_t seed,
                 uint64_t request_size, uint32_t threads, uint64_t ops,
                 const std::string& records_path) {
  compbin_workload w{};
  if (workload == "seq")
    w.kind = COMPBIN_WORKLOAD_SEQUENTIAL_SCAN;
  else if (workload == "randpart")
    w.kind = COMPBIN_WORKLOAD_RANDOM_PARTITION;
  else
    w.kind = COMPBIN_WORKLOAD_REPEATED_RANDOM_READS;
  w.path = file.c_str();
  w.cache_on = cache_on ? 1 : 0;
  w.cache = compbin_cache_config_default();
  if (block_size > 0) w.cache.block_size = block_size;
  if (budget > 0) w.cache.memory_budget = budget;
  w.repetitions = reps;
  w.seed = seed;
  w.request_size = request_size;
  w.threads = threads;
  w.ops = ops;

  char* json = nullptr;
  compbin_status rc = compbin_bench_run_json(&w, &json);
  if (rc != COMPBIN_OK) return fail_with(rc);

  if (records_path.empty()) {
    std::printf("%s\n", json);
  } else {
    std::ofstream out(records_path, std::ios::app);
    if (!out) {
      std::fprintf(stderr, "error: cannot open records file '%s'\n", records_path.c_str());
      compbin_string_free(json);
      return 1;
    }
    out << json << "\n";
    std::fprintf(stderr, "appended record to %s\n", records_path.c_str());
  }
  compbin_string_free(json);
  return 0;
}

int run_report(const std::string& records_path, const std::string& out_path) {
  std::ifstream in(records_path);
  if (!in) {
    std::fprintf(stderr, "error: cannot open records file '%s'\n", records_path.c_str());
    return 1;
  }
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line))
    if (!line.empty()) lines.push_back(line);
  if (lines.empty()) {
    std::fprintf(stderr, "error: no records in '%s'\n", records_path.c_str());
    return 1;
  }

  std::vector<const char*> raw;
  raw.reserve(lines.size());
  for (const std::string& l : lines) raw.push_back(l.c_str());

  char* csv = nullptr;
  compbin_status rc = compbin_bench_report_csv(raw.data(), raw.size(), &csv);
  if (rc != COMPBIN_OK) return fail_with(rc);

  if (out_path.empty()) {
    std::fputs(csv, stdout);
  } else {
    std::ofstream out(out_path);
    out << csv;
  }
  compbin_string_free(csv);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Workload harness for CompBin and the block cache"};
  app.require_subcommand(1);

  std::string out_path;
  std::string model = "uniform";
  std::string format = "text";
  uint64_t vertices = 1;
  uint64_t edges = 0;
  uint64_t seed = 0;

  auto* generate = app.add_subcommand("generate", "Write a seeded synthetic edge list");
  generate->add_option("--model", model, "uniform | rmat")
      ->check(CLI::IsMember({"uniform", "rmat"}));
  generate->add_option("--vertices", vertices, "vertex count")->required();
  generate->add_option("--edges", edges, "edge count")->required();
  generate->add_option("--seed", seed, "generator seed");
  generate->add_option("--format", format, "text | bin64")
      ->check(CLI::IsMember({"text", "bin64"}));
  generate->add_option("out", out_path, "output edge list")->required();

  std::string file;
  std::string workload = "seq";
  std::string cache = "on";
  std::string records;
  uint64_t block_size = 0;
  uint64_t budget = 0;
  uint32_t reps = 1;
  uint64_t request_size = 128 * 1024;
  uint32_t threads = 1;
  uint64_t ops = 1000;

  auto* run = app.add_subcommand("run", "Run one workload and record metrics");
  run->add_option("--workload", workload, "seq | randpart | randread")
      ->check(CLI::IsMember({"seq", "randpart", "randread"}));
  run->add_option("--file", file, "target file (CompBin for randpart)")->required();
  run->add_option("--cache", cache, "on | off")->check(CLI::IsMember({"on", "off"}));
  run->add_option("--block-size", block_size, "cache block size in bytes");
  run->add_option("--budget", budget, "cache memory budget in bytes");
  run->add_option("--reps", reps, "repetitions");
  run->add_option("--seed", seed, "access-sequence seed");
  run->add_option("--request-size", request_size, "caller read granularity in bytes");
  run->add_option("--threads", threads, "reader threads");
  run->add_option("--ops", ops, "reads per repetition (randread)");
  run->add_option("--records", records, "JSONL file to append the record to (default stdout)");

  std::string report_out;
  auto* report = app.add_subcommand("report", "Render recorded runs as CSV");
  report->add_option("--records", records, "JSONL records file")->required();
  report->add_option("--out", report_out, "CSV output path (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;  // 0 for --help, 2 for usage errors
  }

  if (generate->parsed()) return run_generate(out_path, model, vertices, edges, seed, format);
  if (run->parsed())
    return run_workload(file, workload, cache == "on", block_size, budget, reps, seed,
                        request_size, threads, ops, records);
  if (report->parsed()) return run_report(records, report_out);
  return 2;
}
