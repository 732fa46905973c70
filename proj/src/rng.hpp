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

#ifndef COMPBIN_RNG_HPP
#define COMPBIN_RNG_HPP

#include <cstdint>

namespace compbin {

// splitmix64. Output is pinned so generated files and access traces are
// byte-identical across platforms and compiler versions, which std::mt19937
// plus std::uniform_int_distribution does not guarantee.
class SplitMix64 {
 public:
  explicit SplitMix64(uint64_t seed) : state_(seed) {}

  uint64_t next() {
    uint64_t z = (state_ += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }

  // Uniform in [0, n). n must be nonzero.
  uint64_t bounded(uint64_t n) {
    // Rejection sampling over the top range keeps the draw unbiased.
    uint64_t threshold = (0 - n) % n;
    for (;;) {
      uint64_t r = next();
      if (r >= threshold) return r % n;
    }
  }

  // Uniform in [0, 1).
  double canonical() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

 private:
  uint64_t state_;
};

// Deterministic pseudorandom file content, addressable by byte offset.
// Word i of the stream is splitmix64(seed ^ i); byte order within a word is
// little-endian. Tests use this to verify cached reads without keeping a
// reference copy of the file.
inline uint64_t content_word(uint64_t seed, uint64_t word_index) {
  uint64_t z = (seed ^ (word_index * 0x9e3779b97f4a7c15ull)) + 0x9e3779b97f4a7c15ull;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

inline uint8_t content_byte(uint64_t seed, uint64_t offset) {
  return static_cast<uint8_t>(content_word(seed, offset / 8) >> (8 * (offset % 8)));
}

}  // namespace compbin

#endif  // COMPBIN_RNG_HPP
