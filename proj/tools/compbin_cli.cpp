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

// compbin: convert edge lists to CompBin files, verify them, print stats.
// Exit codes: 0 success, 1 validation failure, 2 usage error.

#include <cinttypes>
#include <cstdio>
#include <string>

#include <CLI11.hpp>

#include "compbin/compbin.h"

namespace {

int fail_with(compbin_status status) {
  std::fprintf(stderr, "error (%s): %s\n", compbin_status_name(status), compbin_last_error());
  return 1;
}

int run_convert(const std::string& in, const std::string& out, bool sort, uint64_t vertices,
                const std::string& format) {
  compbin_convert_options opts{};
  opts.format = format == "bin64" ? COMPBIN_EDGES_BIN64 : COMPBIN_EDGES_TEXT;
  opts.sort_neighbors = sort ? 1 : 0;
  opts.vertex_count = vertices;
  compbin_header_info header{};
  compbin_status rc = compbin_convert(in.c_str(), out.c_str(), &opts, &header);
  if (rc != COMPBIN_OK) return fail_with(rc);
  std::printf("wrote %s: vertices=%" PRIu64 " edges=%" PRIu64 " bytes_per_id=%u\n", out.c_str(),
              header.vertex_count, header.edge_count, header.bytes_per_id);
  return 0;
}

int run_verify(const std::string& path) {
  compbin_verify_report* report = nullptr;
  compbin_status rc = compbin_verify(path.c_str(), &report);
  if (rc != COMPBIN_OK) return fail_with(rc);
  const size_t failures = compbin_verify_item_count(report);
  for (size_t i = 0; i < failures; ++i) {
    std::printf("offset %" PRIu64 ": %s\n", compbin_verify_item_offset(report, i),
                compbin_verify_item_message(report, i));
  }
  if (failures == 0)
    std::printf("%s: ok\n", path.c_str());
  else
    std::printf("%s: %zu failure(s)\n", path.c_str(), failures);
  compbin_verify_report_free(report);
  return failures == 0 ? 0 : 1;
}

int run_stats(const std::string& path) {
  compbin_stats_info s{};
  compbin_status rc = compbin_stats(path.c_str(), &s);
  if (rc != COMPBIN_OK) return fail_with(rc);
  const double gib = static_cast<double>(s.file_bytes) / (1024.0 * 1024.0 * 1024.0);
  std::printf("vertices=%" PRIu64 "\n", s.vertices);
  std::printf("edges=%" PRIu64 "\n", s.edges);
  std::printf("bytes_per_id=%u\n", s.bytes_per_id);
  std::printf("file_bytes=%" PRIu64 "\n", s.file_bytes);
  std::printf("file_gib=%.6f\n", gib);
  std::printf("predicted_bytes=%" PRIu64 "\n", s.predicted_bytes);
  std::printf("min_degree=%" PRIu64 "\n", s.min_degree);
  std::printf("max_degree=%" PRIu64 "\n", s.max_degree);
  std::printf("mean_degree=%.6f\n", s.mean_degree);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"CompBin graph file toolkit"};
  app.require_subcommand(1);

  std::string in_path;
  std::string out_path;
  std::string file_path;
  std::string format = "text";
  bool sort = false;
  uint64_t vertices = 0;

  auto* convert = app.add_subcommand("convert", "Convert an edge list to a CompBin file");
  convert->add_option("in", in_path, "input edge list")->required();
  convert->add_option("out", out_path, "output CompBin file")->required();
  convert->add_flag("--sort", sort, "sort each vertex's neighbors ascending");
  convert->add_option("--vertices", vertices,
                      "declared vertex count (default: 1 + max ID seen)");
  convert->add_option("--format", format, "input format: text | bin64")
      ->check(CLI::IsMember({"text", "bin64"}));

  auto* verify = app.add_subcommand("verify", "Validate a CompBin file end to end");
  verify->add_option("file", file_path, "CompBin file")->required();

  auto* stats = app.add_subcommand("stats", "Print header and degree statistics");
  stats->add_option("file", file_path, "CompBin file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;  // 0 for --help, 2 for usage errors
  }

  if (convert->parsed()) return run_convert(in_path, out_path, sort, vertices, format);
  if (verify->parsed()) return run_verify(file_path);
  if (stats->parsed()) return run_stats(file_path);
  return 2;
}
