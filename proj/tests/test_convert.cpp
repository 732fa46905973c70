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

#include <doctest.h>

#include <cstring>
#include <memory>

#include "convert.hpp"
#include "error.hpp"
#include "format.hpp"
#include "loader.hpp"
#include "support/oracle.hpp"

using namespace compbin;
using testsupport::TempDir;

namespace {

std::vector<std::byte> to_bytes(const std::string& s) {
  const auto* p = reinterpret_cast<const std::byte*>(s.data());
  return {p, p + s.size()};
}

std::vector<std::byte> bin64_bytes(const std::vector<Edge>& edges) {
  std::vector<std::byte> out;
  for (const Edge& e : edges) {
    for (int i = 0; i < 8; ++i) out.push_back(static_cast<std::byte>((e.src >> (8 * i)) & 0xff));
    for (int i = 0; i < 8; ++i) out.push_back(static_cast<std::byte>((e.dst >> (8 * i)) & 0xff));
  }
  return out;
}

}  // namespace

TEST_CASE("text edge lists parse with comments and whitespace") {
  MemorySource src(to_bytes("# header comment\n0 1\n  0\t2\n\n2 0\n   # indented comment\n"));
  auto edges = parse_edge_list(src, EdgeListFormat::text);
  REQUIRE(edges.size() == 3);
  CHECK(edges[0].src == 0);
  CHECK(edges[0].dst == 1);
  CHECK(edges[1].dst == 2);
  CHECK(edges[2].src == 2);

  SUBCASE("no trailing newline") {
    MemorySource src2(to_bytes("5 6"));
    auto e2 = parse_edge_list(src2, EdgeListFormat::text);
    REQUIRE(e2.size() == 1);
    CHECK(e2[0].src == 5);
  }

  SUBCASE("malformed lines carry their line number") {
    MemorySource bad(to_bytes("0 1\n2 x\n"));
    CHECK_THROWS_WITH_AS(parse_edge_list(bad, EdgeListFormat::text), doctest::Contains("line 2"),
                         Error);
    MemorySource missing(to_bytes("0 1\n3\n"));
    CHECK_THROWS_AS(parse_edge_list(missing, EdgeListFormat::text), Error);
    MemorySource extra(to_bytes("0 1 7\n"));
    CHECK_THROWS_AS(parse_edge_list(extra, EdgeListFormat::text), Error);
    MemorySource negative(to_bytes("0 -1\n"));
    CHECK_THROWS_AS(parse_edge_list(negative, EdgeListFormat::text), Error);
  }
}

TEST_CASE("bin64 edge lists parse exact records") {
  std::vector<Edge> edges{{1, 2}, {70000, 3}, {5, UINT64_MAX}};
  MemorySource src(bin64_bytes(edges));
  auto parsed = parse_edge_list(src, EdgeListFormat::bin64);
  REQUIRE(parsed.size() == 3);
  CHECK(parsed[1].src == 70000);
  CHECK(parsed[2].dst == UINT64_MAX);

  SUBCASE("odd length is rejected") {
    auto bytes = bin64_bytes(edges);
    bytes.pop_back();
    MemorySource bad(std::move(bytes));
    CHECK_THROWS_AS(parse_edge_list(bad, EdgeListFormat::bin64), Error);
  }
}

TEST_CASE("build_graph places neighbors by counting sort") {
  std::vector<Edge> edges{{0, 1}, {0, 2}, {2, 0}};
  ConvertOptions opts;
  opts.vertex_count = 3;
  GraphData g = build_graph(edges, opts);
  CHECK(g.header.bytes_per_id == 1);
  CHECK(g.offsets == std::vector<uint64_t>{0, 2, 2, 3});
  REQUIRE(g.neighbors.size() == 3);
  CHECK(decode_id(g.neighbors.data(), 1) == 1);
  CHECK(decode_id(g.neighbors.data() + 1, 1) == 2);
  CHECK(decode_id(g.neighbors.data() + 2, 1) == 0);

  SUBCASE("sorting is a no-op when already sorted") {
    opts.sort_neighbors = true;
    GraphData sorted = build_graph(edges, opts);
    CHECK(sorted.neighbors == g.neighbors);
  }

  SUBCASE("sorting orders within each vertex") {
    ConvertOptions sort_opts;
    sort_opts.vertex_count = 10;
    sort_opts.sort_neighbors = true;
    GraphData sorted = build_graph({{0, 9}, {0, 3}, {0, 7}, {1, 5}}, sort_opts);
    CHECK(decode_id(sorted.neighbors.data(), 1) == 3);
    CHECK(decode_id(sorted.neighbors.data() + 1, 1) == 7);
    CHECK(decode_id(sorted.neighbors.data() + 2, 1) == 9);
  }
}

TEST_CASE("vertex count defaults to one past the max ID") {
  GraphData g = build_graph({{0, 1}, {5, 2}}, {});
  CHECK(g.header.vertex_count == 6);

  SUBCASE("empty input yields the one-vertex empty graph") {
    GraphData empty = build_graph({}, {});
    CHECK(empty.header.vertex_count == 1);
    CHECK(empty.header.edge_count == 0);
  }

  SUBCASE("override adds isolated tail vertices") {
    ConvertOptions opts;
    opts.vertex_count = 100;
    GraphData padded = build_graph({{0, 1}}, opts);
    CHECK(padded.header.vertex_count == 100);
    CHECK(padded.offsets.size() == 101);
  }

  SUBCASE("IDs at or above the override are rejected with the record number") {
    ConvertOptions opts;
    opts.vertex_count = 3;
    CHECK_THROWS_WITH_AS(build_graph({{0, 1}, {0, 3}}, opts), doctest::Contains("record 1"),
                         Error);
  }
}

TEST_CASE("duplicate edges and self-loops are preserved") {
  std::vector<Edge> edges{{1, 1}, {0, 2}, {0, 2}, {1, 1}};
  GraphData g = build_graph(edges, {});
  CHECK(g.header.edge_count == 4);
  CHECK(g.offsets == std::vector<uint64_t>{0, 2, 4, 4});
  CHECK(decode_id(g.neighbors.data() + 2, 1) == 1);
  CHECK(decode_id(g.neighbors.data() + 3, 1) == 1);
}

TEST_CASE("convert writes a verify-clean file that loads back") {
  TempDir dir("convert");
  const std::string edges_path = dir.file("edges.txt");
  const std::string out_path = dir.file("g.compbin");

  auto edges = testsupport::random_edges(731, 100000, 17);
  std::string text;
  for (const Edge& e : edges)
    text += std::to_string(e.src) + " " + std::to_string(e.dst) + "\n";
  testsupport::write_text_file(edges_path, text);

  ConvertOptions opts;
  GraphHeader header = convert(edges_path, out_path, opts);
  CHECK(header.edge_count == 100000);
  CHECK(header.bytes_per_id == 2);

  CHECK(verify_file(out_path).ok());

  // Decode-all equals the input multiset.
  Graph g = Graph::open_file(out_path);
  std::vector<std::pair<uint64_t, uint64_t>> decoded;
  Loader::load_whole(g, {}, [&](uint64_t v, std::span<const uint64_t> ids, uint32_t) {
    for (uint64_t u : ids) decoded.emplace_back(v, u);
  });
  std::sort(decoded.begin(), decoded.end());
  CHECK(decoded == testsupport::edge_multiset(edges));
}

TEST_CASE("verify flags corruption with byte offsets") {
  TempDir dir("verify");
  const std::string edges_path = dir.file("edges.txt");
  const std::string out_path = dir.file("g.compbin");
  testsupport::write_text_file(edges_path, "0 1\n0 2\n2 0\n");
  convert(edges_path, out_path, {});

  SUBCASE("convert output passes") { CHECK(verify_file(out_path).ok()); }

  SUBCASE("an out-of-range neighbor is caught at its offset") {
    MmapSource file(out_path);
    std::vector<std::byte> bytes(file.size());
    file.read_at(0, bytes);
    // |V|=3, b=1, neighbors start at 24 + 8*4 = 56; patch group 1 to ID 3.
    bytes[57] = std::byte{3};
    VerifyReport report = verify(MemorySource(std::move(bytes)));
    REQUIRE(report.items.size() == 1);
    CHECK(report.items[0].byte_offset == 57);
    CHECK(report.items[0].message.find("out of range") != std::string::npos);
  }

  SUBCASE("truncation is a length mismatch") {
    MmapSource file(out_path);
    std::vector<std::byte> bytes(file.size() - 1);
    file.read_at(0, bytes);
    VerifyReport report = verify(MemorySource(std::move(bytes)));
    REQUIRE_FALSE(report.ok());
    CHECK(report.items[0].message.find("length") != std::string::npos);
  }

  SUBCASE("corrupt magic is reported") {
    MmapSource file(out_path);
    std::vector<std::byte> bytes(file.size());
    file.read_at(0, bytes);
    bytes[1] = std::byte{0};
    VerifyReport report = verify(MemorySource(std::move(bytes)));
    REQUIRE_FALSE(report.ok());
    CHECK(report.items[0].byte_offset == 0);
  }
}

TEST_CASE("every in-range single-byte mutation keeps verify consistent") {
  // Exhaustive single-byte mutations over a small file's neighbors section:
  // mutations that push an ID out of range are flagged at the exact offset,
  // all others still verify clean.
  auto edges = testsupport::random_edges(200, 50, 4);  // |V|=200, b=1
  ConvertOptions opts;
  opts.vertex_count = 200;
  MemorySink sink;
  write_compbin(build_graph(edges, opts), sink);
  std::vector<std::byte> original = sink.take();
  const uint64_t neighbors_pos = 24 + 8 * 201;
  REQUIRE(original.size() == neighbors_pos + 50);

  int flagged = 0;
  for (uint64_t pos = neighbors_pos; pos < original.size(); ++pos) {
    for (int value = 0; value < 256; value += 17) {  // sampled byte values
      if (static_cast<std::byte>(value) == original[pos]) continue;
      std::vector<std::byte> mutated = original;
      mutated[pos] = static_cast<std::byte>(value);
      VerifyReport report = verify(MemorySource(std::move(mutated)));
      if (value >= 200) {
        REQUIRE(report.items.size() == 1);
        CHECK(report.items[0].byte_offset == pos);
        ++flagged;
      } else {
        CHECK(report.ok());
      }
    }
  }
  CHECK(flagged > 0);
}

TEST_CASE("stats summarises header and degrees") {
  TempDir dir("stats");
  const std::string edges_path = dir.file("edges.txt");
  const std::string out_path = dir.file("g.compbin");
  testsupport::write_text_file(edges_path, "0 1\n0 2\n2 0\n");
  convert(edges_path, out_path, {});

  StatsSummary s = stats_file(out_path);
  CHECK(s.vertices == 3);
  CHECK(s.edges == 3);
  CHECK(s.bytes_per_id == 1);
  CHECK(s.file_bytes == 59);  // 24 + 32 + 3
  CHECK(s.predicted_bytes == 59);
  CHECK(s.min_degree == 0);
  CHECK(s.max_degree == 2);
  CHECK(s.mean_degree == doctest::Approx(1.0));

  SUBCASE("invalid header is rejected") {
    testsupport::write_text_file(out_path, "not a graph");
    CHECK_THROWS_AS(stats_file(out_path), Error);
  }
}
