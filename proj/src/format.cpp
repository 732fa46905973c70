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

#include "format.hpp"

#include <bit>
#include <cstring>

#include "block_cache.hpp"
#include "error.hpp"

namespace compbin {

namespace {

void put_u16le(std::byte* p, uint16_t v) {
  p[0] = static_cast<std::byte>(v & 0xff);
  p[1] = static_cast<std::byte>(v >> 8);
}

void put_u64le(std::byte* p, uint64_t v) {
  for (int i = 0; i < 8; ++i) p[i] = static_cast<std::byte>((v >> (8 * i)) & 0xff);
}

uint16_t get_u16le(const std::byte* p) {
  return static_cast<uint16_t>(std::to_integer<unsigned>(p[0]) |
                               (std::to_integer<unsigned>(p[1]) << 8));
}

uint64_t get_u64le(const std::byte* p) {
  uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<uint64_t>(std::to_integer<unsigned>(p[i])) << (8 * i);
  return v;
}

}  // namespace

uint8_t bytes_per_id(uint64_t vertex_count) {
  if (vertex_count == 0) fail(Errc::invalid_graph, "vertex count must be at least 1");
  if (vertex_count <= 2) return 1;
  // Smallest k with 2^k >= |V|, then ceil(k / 8). Integer bit arithmetic
  // avoids float rounding near powers of two.
  unsigned k = static_cast<unsigned>(std::bit_width(vertex_count - 1));
  return static_cast<uint8_t>((k + 7) / 8);
}

void encode_id(uint64_t id, unsigned width, std::byte* out) {
  if (width < 1 || width > 8) fail(Errc::invalid_argument, "id width must be in 1..8");
  if (width < 8 && id >= (uint64_t{1} << (8 * width)))
    fail(Errc::encode_overflow,
         "id " + std::to_string(id) + " does not fit in " + std::to_string(width) + " bytes");
  for (unsigned i = 0; i < width; ++i) out[i] = static_cast<std::byte>((id >> (8 * i)) & 0xff);
}

uint64_t decode_id(const std::byte* group, unsigned width) {
  uint64_t id = 0;
  for (unsigned i = 0; i < width; ++i)
    id |= static_cast<uint64_t>(std::to_integer<unsigned>(group[i])) << (8 * i);
  return id;
}

uint64_t compbin_file_size(uint64_t vertex_count, uint64_t edge_count, unsigned width) {
  return kHeaderSize + 8 * (vertex_count + 1) + static_cast<uint64_t>(width) * edge_count;
}

void GraphData::validate() const {
  const uint64_t v = header.vertex_count;
  const uint64_t e = header.edge_count;
  if (v == 0) fail(Errc::invalid_graph, "vertex count must be at least 1");
  if (header.bytes_per_id != bytes_per_id(v))
    fail(Errc::invalid_graph, "bytes_per_id does not match the byte-width rule");
  if (offsets.size() != v + 1) fail(Errc::invalid_graph, "offsets array must have |V|+1 entries");
  if (offsets.front() != 0) fail(Errc::invalid_graph, "offsets[0] must be 0");
  if (offsets.back() != e) fail(Errc::invalid_graph, "offsets[|V|] must equal |E|");
  for (uint64_t i = 0; i < v; ++i)
    if (offsets[i] > offsets[i + 1]) fail(Errc::invalid_graph, "offsets must be non-decreasing");
  if (neighbors.size() != static_cast<uint64_t>(header.bytes_per_id) * e)
    fail(Errc::invalid_graph, "neighbors array must be exactly b*|E| bytes");
}

uint64_t write_compbin(const GraphData& graph, ByteSink& sink) {
  graph.validate();
  std::byte header[kHeaderSize];
  std::memcpy(header, kMagic, 4);
  put_u16le(header + 4, graph.header.version);
  header[6] = static_cast<std::byte>(graph.header.bytes_per_id);
  header[7] = std::byte{0};
  put_u64le(header + 8, graph.header.vertex_count);
  put_u64le(header + 16, graph.header.edge_count);
  sink.write({header, kHeaderSize});

  // Offsets stream out through a fixed chunk so huge graphs do not need a
  // second |V|-sized buffer.
  constexpr size_t kChunkEntries = 8192;
  std::vector<std::byte> chunk(kChunkEntries * 8);
  size_t filled = 0;
  for (uint64_t off : graph.offsets) {
    put_u64le(chunk.data() + filled * 8, off);
    if (++filled == kChunkEntries) {
      sink.write({chunk.data(), filled * 8});
      filled = 0;
    }
  }
  if (filled > 0) sink.write({chunk.data(), filled * 8});

  sink.write(graph.neighbors);
  return compbin_file_size(graph.header.vertex_count, graph.header.edge_count,
                           graph.header.bytes_per_id);
}

Graph Graph::open(std::shared_ptr<ByteSource> source) {
  auto impl = std::make_shared<Impl>();
  impl->source = std::move(source);
  const uint64_t len = impl->source->size();
  if (len < kHeaderSize) fail(Errc::format, "file truncated: shorter than the 24-byte header");

  std::byte header[kHeaderSize];
  impl->source->read_at(0, {header, kHeaderSize});
  if (std::memcmp(header, kMagic, 4) != 0) fail(Errc::format, "bad magic: not a CompBin file");
  impl->header.version = get_u16le(header + 4);
  if (impl->header.version != kFormatVersion)
    fail(Errc::format, "unsupported format version " + std::to_string(impl->header.version));
  impl->header.bytes_per_id = std::to_integer<uint8_t>(header[6]);
  if (header[7] != std::byte{0}) fail(Errc::format, "reserved header byte must be 0");
  impl->header.vertex_count = get_u64le(header + 8);
  impl->header.edge_count = get_u64le(header + 16);

  const uint64_t v = impl->header.vertex_count;
  const uint64_t e = impl->header.edge_count;
  if (v == 0) fail(Errc::format, "vertex count must be at least 1");
  if (impl->header.bytes_per_id != bytes_per_id(v))
    fail(Errc::format, "bytes_per_id " + std::to_string(impl->header.bytes_per_id) +
                           " does not match the byte-width rule for |V|=" + std::to_string(v));

  // Exact length check, widened so a corrupt header cannot overflow it.
  const unsigned __int128 expected =
      static_cast<unsigned __int128>(kHeaderSize) + static_cast<unsigned __int128>(8) * (v + 1) +
      static_cast<unsigned __int128>(impl->header.bytes_per_id) * e;
  if (expected != static_cast<unsigned __int128>(len))
    fail(Errc::format, "file length " + std::to_string(len) + " does not match header (|V|=" +
                           std::to_string(v) + ", |E|=" + std::to_string(e) +
                           ", b=" + std::to_string(impl->header.bytes_per_id) + ")");

  impl->offsets.resize(v + 1);
  {
    constexpr uint64_t kChunkEntries = 65536;
    std::vector<std::byte> chunk(kChunkEntries * 8);
    uint64_t done = 0;
    while (done < v + 1) {
      uint64_t take = std::min(kChunkEntries, v + 1 - done);
      impl->source->read_at(kOffsetsPos + done * 8, {chunk.data(), take * 8});
      for (uint64_t i = 0; i < take; ++i) impl->offsets[done + i] = get_u64le(chunk.data() + i * 8);
      done += take;
    }
  }
  if (impl->offsets.front() != 0) fail(Errc::format, "offsets[0] must be 0");
  if (impl->offsets.back() != e) fail(Errc::format, "offsets[|V|] must equal |E|");
  for (uint64_t i = 0; i < v; ++i)
    if (impl->offsets[i] > impl->offsets[i + 1])
      fail(Errc::format, "offsets not non-decreasing at index " + std::to_string(i));

  impl->neighbors_pos = kOffsetsPos + 8 * (v + 1);
  return Graph(std::move(impl));
}

Graph Graph::open_file(const std::string& path) {
  return open(std::make_shared<MmapSource>(path));
}

Graph Graph::open_cached(const std::string& path, const CacheConfig& config) {
  return open(std::make_shared<CachedSource>(CachedFile::open(path, config)));
}

uint64_t Graph::degree(uint64_t v) const {
  if (v >= impl_->header.vertex_count)
    fail(Errc::bounds, "vertex " + std::to_string(v) + " out of range");
  return impl_->offsets[v + 1] - impl_->offsets[v];
}

uint64_t Graph::neighbor(uint64_t v, uint64_t n) const {
  if (n >= degree(v))
    fail(Errc::bounds, "neighbor index " + std::to_string(n) + " out of range for vertex " +
                           std::to_string(v));
  const unsigned b = impl_->header.bytes_per_id;
  const uint64_t pos = impl_->neighbors_pos + (impl_->offsets[v] + n) * b;
  if (const std::byte* base = impl_->source->mapped()) return decode_id(base + pos, b);
  std::byte group[8];
  impl_->source->read_at(pos, {group, b});
  return decode_id(group, b);
}

void Graph::read_neighbor_bytes(uint64_t edge_index, uint64_t count, std::byte* dst) const {
  const unsigned b = impl_->header.bytes_per_id;
  impl_->source->read_at(impl_->neighbors_pos + edge_index * b, {dst, count * b});
}

const std::byte* Graph::mapped_neighbors() const {
  const std::byte* base = impl_->source->mapped();
  return base == nullptr ? nullptr : base + impl_->neighbors_pos;
}

}  // namespace compbin
