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

#include "convert.hpp"

#include <algorithm>
#include <cctype>
#include <cstring>

#include "error.hpp"

namespace compbin {

namespace {

uint64_t get_u64le(const std::byte* p) {
  uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<uint64_t>(std::to_integer<unsigned>(p[i])) << (8 * i);
  return v;
}

uint16_t get_u16le(const std::byte* p) {
  return static_cast<uint16_t>(std::to_integer<unsigned>(p[0]) |
                               (std::to_integer<unsigned>(p[1]) << 8));
}

bool parse_u64(const char*& p, const char* end, uint64_t& out) {
  if (p == end || !std::isdigit(static_cast<unsigned char>(*p))) return false;
  uint64_t v = 0;
  while (p != end && std::isdigit(static_cast<unsigned char>(*p))) {
    unsigned digit = static_cast<unsigned>(*p - '0');
    if (v > (UINT64_MAX - digit) / 10) return false;  // overflow
    v = v * 10 + digit;
    ++p;
  }
  out = v;
  return true;
}

std::vector<Edge> parse_text(const ByteSource& source) {
  std::vector<Edge> edges;
  const uint64_t len = source.size();
  std::vector<std::byte> owned;
  const char* data;
  if (source.mapped() != nullptr) {
    data = reinterpret_cast<const char*>(source.mapped());
  } else {
    owned.resize(len);
    source.read_at(0, owned);
    data = reinterpret_cast<const char*>(owned.data());
  }

  uint64_t line_no = 0;
  const char* p = data;
  const char* end = data + len;
  while (p < end) {
    ++line_no;
    const char* eol = static_cast<const char*>(std::memchr(p, '\n', end - p));
    if (eol == nullptr) eol = end;
    const char* q = p;
    while (q < eol && std::isspace(static_cast<unsigned char>(*q))) ++q;
    if (q < eol && *q != '#') {
      uint64_t src, dst;
      const char* r = q;
      bool ok = parse_u64(r, eol, src);
      if (ok) {
        while (r < eol && (*r == ' ' || *r == '\t')) ++r;
        ok = parse_u64(r, eol, dst);
      }
      if (ok) {
        while (r < eol && std::isspace(static_cast<unsigned char>(*r))) ++r;
        ok = (r == eol);
      }
      if (!ok)
        fail(Errc::parse, "malformed edge at line " + std::to_string(line_no) +
                              ": expected two non-negative integers");
      edges.push_back({src, dst});
    }
    p = eol + 1;
  }
  return edges;
}

std::vector<Edge> parse_bin64(const ByteSource& source) {
  const uint64_t len = source.size();
  if (len % 16 != 0)
    fail(Errc::parse, "binary edge list length " + std::to_string(len) +
                          " is not a multiple of 16 (record " + std::to_string(len / 16) + ")");
  std::vector<Edge> edges(len / 16);
  constexpr uint64_t kChunkRecords = 65536;
  std::vector<std::byte> chunk(kChunkRecords * 16);
  uint64_t done = 0;
  while (done < edges.size()) {
    uint64_t take = std::min(kChunkRecords, edges.size() - done);
    source.read_at(done * 16, {chunk.data(), take * 16});
    for (uint64_t i = 0; i < take; ++i)
      edges[done + i] = {get_u64le(chunk.data() + i * 16), get_u64le(chunk.data() + i * 16 + 8)};
    done += take;
  }
  return edges;
}

}  // namespace

std::vector<Edge> parse_edge_list(const ByteSource& source, EdgeListFormat format) {
  return format == EdgeListFormat::text ? parse_text(source) : parse_bin64(source);
}

GraphData build_graph(const std::vector<Edge>& edges, const ConvertOptions& options) {
  uint64_t vertex_count;
  if (options.vertex_count.has_value()) {
    vertex_count = *options.vertex_count;
    if (vertex_count == 0) fail(Errc::invalid_graph, "vertex count must be at least 1");
    for (uint64_t i = 0; i < edges.size(); ++i) {
      if (edges[i].src >= vertex_count || edges[i].dst >= vertex_count)
        fail(Errc::range, "edge record " + std::to_string(i) + " references vertex " +
                              std::to_string(std::max(edges[i].src, edges[i].dst)) +
                              " >= declared vertex count " + std::to_string(vertex_count));
    }
  } else {
    uint64_t max_id = 0;
    for (const Edge& e : edges) max_id = std::max({max_id, e.src, e.dst});
    if (!edges.empty() && max_id == UINT64_MAX)
      fail(Errc::invalid_graph, "vertex ID space overflows 64 bits");
    vertex_count = edges.empty() ? 1 : max_id + 1;
  }

  GraphData g;
  g.header.vertex_count = vertex_count;
  g.header.edge_count = edges.size();
  g.header.bytes_per_id = bytes_per_id(vertex_count);
  const unsigned b = g.header.bytes_per_id;

  // Pass 1: degree counts -> offsets prefix sum.
  g.offsets.assign(vertex_count + 1, 0);
  for (const Edge& e : edges) ++g.offsets[e.src + 1];
  for (uint64_t v = 0; v < vertex_count; ++v) g.offsets[v + 1] += g.offsets[v];

  // Pass 2: place encoded neighbors with a moving cursor per vertex.
  g.neighbors.resize(b * edges.size());
  std::vector<uint64_t> cursor(g.offsets.begin(), g.offsets.end() - 1);
  for (const Edge& e : edges) encode_id(e.dst, b, g.neighbors.data() + (cursor[e.src]++) * b);

  if (options.sort_neighbors) {
    std::vector<uint64_t> ids;
    for (uint64_t v = 0; v < vertex_count; ++v) {
      const uint64_t deg = g.offsets[v + 1] - g.offsets[v];
      if (deg < 2) continue;
      ids.resize(deg);
      std::byte* base = g.neighbors.data() + g.offsets[v] * b;
      for (uint64_t i = 0; i < deg; ++i) ids[i] = decode_id(base + i * b, b);
      std::sort(ids.begin(), ids.end());
      for (uint64_t i = 0; i < deg; ++i) encode_id(ids[i], b, base + i * b);
    }
  }
  return g;
}

GraphHeader convert(const std::string& in_path, const std::string& out_path,
                    const ConvertOptions& options) {
  MmapSource in(in_path);
  GraphData g = build_graph(parse_edge_list(in, options.format), options);
  FileSink out(out_path);
  write_compbin(g, out);
  out.close();
  return g.header;
}

VerifyReport verify(const ByteSource& source) {
  VerifyReport report;
  auto flag = [&report](uint64_t offset, std::string msg) {
    report.items.push_back({offset, std::move(msg)});
  };

  const uint64_t len = source.size();
  if (len < kHeaderSize) {
    flag(len, "file length " + std::to_string(len) + " shorter than the 24-byte header");
    return report;
  }
  std::byte header[kHeaderSize];
  source.read_at(0, {header, kHeaderSize});
  if (std::memcmp(header, kMagic, 4) != 0) flag(0, "bad magic: not a CompBin file");
  const uint16_t version = get_u16le(header + 4);
  if (version != kFormatVersion) flag(4, "unsupported format version " + std::to_string(version));
  const uint8_t b = std::to_integer<uint8_t>(header[6]);
  if (header[7] != std::byte{0}) flag(7, "reserved header byte is nonzero");
  const uint64_t v = get_u64le(header + 8);
  const uint64_t e = get_u64le(header + 16);
  if (v == 0) {
    flag(8, "vertex count must be at least 1");
    return report;
  }
  if (b != bytes_per_id(v))
    flag(6, "bytes_per_id " + std::to_string(b) + " does not match the byte-width rule (" +
                std::to_string(bytes_per_id(v)) + ") for |V|=" + std::to_string(v));
  if (b == 0) return report;  // cannot do geometry with a zero width

  // Geometry uses the stored b: length must match the header exactly.
  const unsigned __int128 expected = static_cast<unsigned __int128>(kHeaderSize) +
                                     static_cast<unsigned __int128>(8) * (v + 1) +
                                     static_cast<unsigned __int128>(b) * e;
  if (expected != static_cast<unsigned __int128>(len)) {
    flag(len, "file length " + std::to_string(len) + " does not match header-implied size");
    return report;
  }

  // Offsets: non-decreasing, anchored at 0 and |E|.
  constexpr uint64_t kChunkEntries = 65536;
  std::vector<std::byte> chunk(kChunkEntries * 8);
  uint64_t prev = 0;
  for (uint64_t done = 0; done < v + 1;) {
    const uint64_t take = std::min(kChunkEntries, v + 1 - done);
    source.read_at(kOffsetsPos + done * 8, {chunk.data(), take * 8});
    for (uint64_t i = 0; i < take; ++i) {
      const uint64_t idx = done + i;
      const uint64_t off = get_u64le(chunk.data() + i * 8);
      if (idx == 0 && off != 0) flag(kOffsetsPos, "offsets[0] is not 0");
      if (idx > 0 && off < prev)
        flag(kOffsetsPos + idx * 8, "offsets decrease at index " + std::to_string(idx));
      if (idx == v && off != e)
        flag(kOffsetsPos + idx * 8, "offsets[|V|] is " + std::to_string(off) +
                                        ", expected |E|=" + std::to_string(e));
      prev = off;
    }
    done += take;
  }

  // Neighbors: every decoded ID must be < |V|.
  const uint64_t neighbors_pos = kOffsetsPos + 8 * (v + 1);
  const uint64_t group_chunk = kChunkEntries;
  std::vector<std::byte> groups(group_chunk * b);
  for (uint64_t done = 0; done < e;) {
    const uint64_t take = std::min(group_chunk, e - done);
    source.read_at(neighbors_pos + done * b, {groups.data(), take * b});
    for (uint64_t i = 0; i < take; ++i) {
      const uint64_t id = decode_id(groups.data() + i * b, b);
      if (id >= v)
        flag(neighbors_pos + (done + i) * b,
             "neighbor ID " + std::to_string(id) + " at edge index " + std::to_string(done + i) +
                 " is out of range (|V|=" + std::to_string(v) + ")");
    }
    done += take;
  }
  return report;
}

VerifyReport verify_file(const std::string& path) {
  MmapSource source(path);
  return verify(source);
}

StatsSummary stats_file(const std::string& path) {
  Graph g = Graph::open_file(path);
  StatsSummary s;
  s.vertices = g.vertices();
  s.edges = g.edges();
  s.bytes_per_id = static_cast<uint8_t>(g.id_bytes());
  s.file_bytes = g.source()->size();
  s.predicted_bytes = compbin_file_size(s.vertices, s.edges, s.bytes_per_id);
  s.min_degree = UINT64_MAX;
  for (uint64_t v = 0; v < s.vertices; ++v) {
    const uint64_t deg = g.offset_at(v + 1) - g.offset_at(v);
    s.min_degree = std::min(s.min_degree, deg);
    s.max_degree = std::max(s.max_degree, deg);
  }
  if (s.vertices == 0) s.min_degree = 0;
  s.mean_degree = static_cast<double>(s.edges) / static_cast<double>(s.vertices);
  return s;
}

}  // namespace compbin
