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

#include "generate.hpp"

#include <bit>
#include <cstdio>
#include <cstring>

#include "error.hpp"
#include "rng.hpp"

namespace compbin {

namespace {

void put_u64le(std::byte* p, uint64_t v) {
  for (int i = 0; i < 8; ++i) p[i] = static_cast<std::byte>((v >> (8 * i)) & 0xff);
}

Edge draw_uniform(SplitMix64& rng, uint64_t vertices) {
  return {rng.bounded(vertices), rng.bounded(vertices)};
}

// Classic R-MAT: recursively pick a quadrant of the adjacency matrix with
// probabilities (a, b, c, d) until a single cell remains. Samples landing
// outside [0, vertices) are redrawn, which keeps the draw deterministic for
// vertex counts that are not powers of two.
Edge draw_rmat(SplitMix64& rng, uint64_t vertices, double a, double b, double c) {
  const unsigned scale = vertices <= 1 ? 1 : static_cast<unsigned>(std::bit_width(vertices - 1));
  for (;;) {
    uint64_t u = 0;
    uint64_t v = 0;
    for (unsigned level = 0; level < scale; ++level) {
      const double r = rng.canonical();
      unsigned qu = 0;
      unsigned qv = 0;
      if (r < a) {
        // top-left
      } else if (r < a + b) {
        qv = 1;
      } else if (r < a + b + c) {
        qu = 1;
      } else {
        qu = 1;
        qv = 1;
      }
      u = (u << 1) | qu;
      v = (v << 1) | qv;
    }
    if (u < vertices && v < vertices) return {u, v};
  }
}

}  // namespace

void generate(const GenerateOptions& options, ByteSink& sink) {
  if (options.vertices == 0) fail(Errc::invalid_argument, "vertices must be at least 1");
  if (options.model == GenerateOptions::Model::rmat) {
    const double d = 1.0 - options.a - options.b - options.c;
    if (options.a < 0 || options.b < 0 || options.c < 0 || d < 0)
      fail(Errc::invalid_argument, "R-MAT probabilities must be non-negative and sum to at most 1");
  }

  SplitMix64 rng(options.seed);
  std::vector<std::byte> buf;
  buf.reserve(1 << 16);
  char line[48];
  for (uint64_t i = 0; i < options.edges; ++i) {
    const Edge e = options.model == GenerateOptions::Model::uniform
                       ? draw_uniform(rng, options.vertices)
                       : draw_rmat(rng, options.vertices, options.a, options.b, options.c);
    if (options.format == EdgeListFormat::text) {
      const int n = std::snprintf(line, sizeof line, "%llu %llu\n",
                                  static_cast<unsigned long long>(e.src),
                                  static_cast<unsigned long long>(e.dst));
      const auto* p = reinterpret_cast<const std::byte*>(line);
      buf.insert(buf.end(), p, p + n);
    } else {
      std::byte rec[16];
      put_u64le(rec, e.src);
      put_u64le(rec + 8, e.dst);
      buf.insert(buf.end(), rec, rec + 16);
    }
    if (buf.size() >= (1 << 16)) {
      sink.write(buf);
      buf.clear();
    }
  }
  if (!buf.empty()) sink.write(buf);
}

void generate_file(const GenerateOptions& options, const std::string& path) {
  FileSink sink(path);
  generate(options, sink);
  sink.close();
}

}  // namespace compbin
