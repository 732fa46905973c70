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

#ifndef COMPBIN_CONVERT_HPP
#define COMPBIN_CONVERT_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "byte_io.hpp"
#include "format.hpp"

namespace compbin {

enum class EdgeListFormat { text, bin64 };

struct Edge {
  uint64_t src;
  uint64_t dst;
};

/// Parses an edge-list source.
///   text:  one edge per line, two non-negative decimal integers separated by
///          whitespace; blank lines and lines starting with '#' are skipped.
///   bin64: consecutive (src, dst) pairs of little-endian u64.
/// Malformed input raises Errc::parse naming the line or record.
std::vector<Edge> parse_edge_list(const ByteSource& source, EdgeListFormat format);

struct ConvertOptions {
  EdgeListFormat format = EdgeListFormat::text;
  bool sort_neighbors = false;
  std::optional<uint64_t> vertex_count;  // default: 1 + max ID seen
};

/// Builds the CSR arrays with a two-pass counting sort: pass one counts
/// degrees into the offsets prefix sum, pass two places encoded neighbors.
/// Per-vertex neighbor order preserves input order unless sort_neighbors.
/// An edge referencing an ID >= the declared vertex count raises Errc::range
/// with the record number.
GraphData build_graph(const std::vector<Edge>& edges, const ConvertOptions& options);

GraphHeader convert(const std::string& in_path, const std::string& out_path,
                    const ConvertOptions& options);

struct VerifyItem {
  uint64_t byte_offset;
  std::string message;
};

struct VerifyReport {
  std::vector<VerifyItem> items;
  bool ok() const { return items.empty(); }
};

/// Full-file validation: magic, version, reserved byte, byte-width rule,
/// exact length, offsets shape and monotonicity, and a scan of every neighbor
/// ID against |V|. Failures accumulate in the report; nothing throws short of
/// an unreadable source.
VerifyReport verify(const ByteSource& source);
VerifyReport verify_file(const std::string& path);

struct StatsSummary {
  uint64_t vertices = 0;
  uint64_t edges = 0;
  uint8_t bytes_per_id = 1;
  uint64_t file_bytes = 0;
  uint64_t predicted_bytes = 0;
  uint64_t min_degree = 0;
  uint64_t max_degree = 0;
  double mean_degree = 0.0;
};

/// Header-level summary of a CompBin file. Requires a valid header (throws
/// Errc::format otherwise). predicted_bytes always equals file_bytes for a
/// file that opens.
StatsSummary stats_file(const std::string& path);

}  // namespace compbin

#endif  // COMPBIN_CONVERT_HPP
