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

#ifndef COMPBIN_TESTS_SUPPORT_ORACLE_HPP
#define COMPBIN_TESTS_SUPPORT_ORACLE_HPP

#include <algorithm>
#include <bit>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "convert.hpp"
#include "rng.hpp"

namespace testsupport {

// Adjacency-list oracle built straight from an edge list, independent of the
// CompBin encode/decode path. Tests compare decoded graphs against this.
class AdjacencyOracle {
 public:
  AdjacencyOracle(const std::vector<compbin::Edge>& edges, uint64_t vertex_count)
      : adjacency_(vertex_count) {
    for (const compbin::Edge& e : edges) adjacency_[e.src].push_back(e.dst);
  }

  uint64_t vertices() const { return adjacency_.size(); }
  uint64_t degree(uint64_t v) const { return adjacency_[v].size(); }
  uint64_t neighbor(uint64_t v, uint64_t n) const { return adjacency_[v][n]; }
  const std::vector<uint64_t>& neighbors(uint64_t v) const { return adjacency_[v]; }

  void sort_neighbors() {
    for (auto& list : adjacency_) std::sort(list.begin(), list.end());
  }

 private:
  std::vector<std::vector<uint64_t>> adjacency_;
};

inline std::vector<compbin::Edge> random_edges(uint64_t vertex_count, uint64_t edge_count,
                                               uint64_t seed) {
  compbin::SplitMix64 rng(seed);
  std::vector<compbin::Edge> edges(edge_count);
  for (auto& e : edges) e = {rng.bounded(vertex_count), rng.bounded(vertex_count)};
  return edges;
}

// Edge multiset as a sorted pair list, for exact multiset comparisons.
inline std::vector<std::pair<uint64_t, uint64_t>> edge_multiset(
    const std::vector<compbin::Edge>& edges) {
  std::vector<std::pair<uint64_t, uint64_t>> pairs;
  pairs.reserve(edges.size());
  for (const compbin::Edge& e : edges) pairs.emplace_back(e.src, e.dst);
  std::sort(pairs.begin(), pairs.end());
  return pairs;
}

// Unique scratch directory, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    auto base = std::filesystem::temp_directory_path();
    std::random_device rd;
    for (int attempt = 0; attempt < 64; ++attempt) {
      auto candidate = base / (tag + "-" + std::to_string(rd()));
      std::error_code ec;
      if (std::filesystem::create_directory(candidate, ec)) {
        path_ = candidate;
        return;
      }
    }
    throw std::runtime_error("cannot create temp directory");
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  std::string file(const std::string& name) const { return (path_ / name).string(); }
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

inline void write_text_file(const std::string& path, const std::string& content) {
  compbin::FileSink sink(path);
  sink.write({reinterpret_cast<const std::byte*>(content.data()), content.size()});
  sink.close();
}

// Writes `length` bytes of seed-determined pseudorandom content.
inline void write_pseudorandom_file(const std::string& path, uint64_t length, uint64_t seed) {
  compbin::FileSink sink(path);
  std::vector<std::byte> chunk(1 << 20);
  uint64_t written = 0;
  while (written < length) {
    const uint64_t take = std::min<uint64_t>(chunk.size(), length - written);
    for (uint64_t i = 0; i < take; i += 8) {
      const uint64_t word = compbin::content_word(seed, (written + i) / 8);
      for (uint64_t j = 0; j < 8 && i + j < take; ++j)
        chunk[i + j] = static_cast<std::byte>((word >> (8 * j)) & 0xff);
    }
    sink.write({chunk.data(), take});
    written += take;
  }
  sink.close();
}

// Verifies a byte range against the pseudorandom content definition.
// Word-at-a-time on the aligned middle so large stress reads verify fast.
inline bool matches_pseudorandom(const std::byte* data, uint64_t file_offset, uint64_t length,
                                 uint64_t seed) {
  uint64_t i = 0;
  while (i < length && (file_offset + i) % 8 != 0) {
    if (std::to_integer<uint8_t>(data[i]) != compbin::content_byte(seed, file_offset + i))
      return false;
    ++i;
  }
  while (i + 8 <= length) {
    uint64_t actual;
    std::memcpy(&actual, data + i, 8);
    uint64_t expect = compbin::content_word(seed, (file_offset + i) / 8);
    if constexpr (std::endian::native == std::endian::big) expect = __builtin_bswap64(expect);
    if (actual != expect) return false;
    i += 8;
  }
  while (i < length) {
    if (std::to_integer<uint8_t>(data[i]) != compbin::content_byte(seed, file_offset + i))
      return false;
    ++i;
  }
  return true;
}

}  // namespace testsupport

#endif  // COMPBIN_TESTS_SUPPORT_ORACLE_HPP
