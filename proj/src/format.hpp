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

#ifndef COMPBIN_FORMAT_HPP
#define COMPBIN_FORMAT_HPP

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "byte_io.hpp"

namespace compbin {

struct CacheConfig;  // block_cache.hpp

// CompBin container layout, all integers little-endian:
//   offset  0: magic "CBIN"
//   offset  4: format version, u16
//   offset  6: bytes per vertex ID (b), u8
//   offset  7: reserved, u8 = 0
//   offset  8: vertex count |V|, u64
//   offset 16: edge count |E|, u64
//   offset 24: offsets array, (|V|+1) x u64
//   then     : neighbors array, b*|E| bytes, each ID packed LSB first
inline constexpr unsigned char kMagic[4] = {0x43, 0x42, 0x49, 0x4e};  // "CBIN"
inline constexpr uint16_t kFormatVersion = 1;
inline constexpr uint64_t kHeaderSize = 24;
inline constexpr uint64_t kOffsetsPos = kHeaderSize;

struct GraphHeader {
  uint16_t version = kFormatVersion;
  uint8_t bytes_per_id = 1;
  uint64_t vertex_count = 0;
  uint64_t edge_count = 0;
};

/// Minimum number of bytes that can hold any ID below vertex_count:
/// ceil(log2(|V|) / 8), computed in integer arithmetic, with a floor of one
/// byte for the degenerate |V| in {1, 2} and a cap of eight.
/// Throws Errc::invalid_graph when vertex_count is zero.
uint8_t bytes_per_id(uint64_t vertex_count);

/// Packs id into exactly width bytes, least significant byte first.
/// Throws Errc::encode_overflow when id needs more than width bytes.
void encode_id(uint64_t id, unsigned width, std::byte* out);

/// Inverse of encode_id: sum of out[i] << (8*i) over the width bytes.
uint64_t decode_id(const std::byte* group, unsigned width);

/// Exact on-storage size: kHeaderSize + 8*(|V|+1) + b*|E|.
uint64_t compbin_file_size(uint64_t vertex_count, uint64_t edge_count, unsigned width);

/// Fully materialized graph, used when building a file.
struct GraphData {
  GraphHeader header;
  std::vector<uint64_t> offsets;     // |V|+1 entries, offsets[0] == 0
  std::vector<std::byte> neighbors;  // b*|E| bytes

  /// Checks the structural invariants (offsets shape, monotonicity, array
  /// lengths, bytes_per_id rule). Throws Errc::invalid_graph on violation.
  void validate() const;
};

/// Serializes the graph. Returns the byte count written, which always equals
/// compbin_file_size(...). Sink failures propagate with the byte position.
uint64_t write_compbin(const GraphData& graph, ByteSink& sink);

/// Read handle over a CompBin file. Header and offsets are validated at open;
/// neighbor IDs are not range-checked on decode (the verify pass does that).
/// Handles are cheap shared values, immutable after open, and safe for
/// unlimited concurrent readers.
class Graph {
 public:
  /// Validates magic, version, byte-width rule, exact file length, and
  /// offsets monotonicity. Throws Errc::format naming the offending field.
  static Graph open(std::shared_ptr<ByteSource> source);
  static Graph open_file(const std::string& path);  // mmap-backed
  /// Routes all byte access through a block cache over the file.
  static Graph open_cached(const std::string& path, const CacheConfig& config);

  const GraphHeader& header() const { return impl_->header; }
  uint64_t vertices() const { return impl_->header.vertex_count; }
  uint64_t edges() const { return impl_->header.edge_count; }
  unsigned id_bytes() const { return impl_->header.bytes_per_id; }

  uint64_t offset_at(uint64_t i) const { return impl_->offsets[i]; }  // i <= |V|
  std::span<const uint64_t> offsets() const { return impl_->offsets; }

  /// offsets[v+1] - offsets[v]. Throws Errc::bounds for v >= |V|.
  uint64_t degree(uint64_t v) const;

  /// ID of the n-th neighbor of v, decoded as the b bytes at edge index
  /// offsets[v]+n, least significant byte first.
  /// Throws Errc::bounds when v >= |V| or n >= degree(v).
  uint64_t neighbor(uint64_t v, uint64_t n) const;

  /// Copies count neighbor groups starting at edge_index into dst
  /// (count * id_bytes() bytes). Bulk path for the loader.
  void read_neighbor_bytes(uint64_t edge_index, uint64_t count, std::byte* dst) const;

  /// Base of the neighbors array when the source is memory-mapped, else null.
  const std::byte* mapped_neighbors() const;

  uint64_t neighbors_pos() const { return impl_->neighbors_pos; }
  const std::shared_ptr<ByteSource>& source() const { return impl_->source; }

 private:
  struct Impl {
    GraphHeader header;
    std::vector<uint64_t> offsets;
    uint64_t neighbors_pos = 0;
    std::shared_ptr<ByteSource> source;
  };

  explicit Graph(std::shared_ptr<const Impl> impl) : impl_(std::move(impl)) {}

  std::shared_ptr<const Impl> impl_;
};

}  // namespace compbin

#endif  // COMPBIN_FORMAT_HPP
