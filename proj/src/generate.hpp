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

#ifndef COMPBIN_GENERATE_HPP
#define COMPBIN_GENERATE_HPP

#include <cstdint>
#include <string>

#include "byte_io.hpp"
#include "convert.hpp"

namespace compbin {

struct GenerateOptions {
  enum class Model { uniform, rmat };
  Model model = Model::uniform;
  uint64_t vertices = 1;
  uint64_t edges = 0;
  uint64_t seed = 0;
  // R-MAT quadrant probabilities; d is the remainder. Defaults are the
  // Graph500 setting.
  double a = 0.57;
  double b = 0.19;
  double c = 0.19;
  EdgeListFormat format = EdgeListFormat::text;
};

/// Writes a seeded synthetic edge list. Byte-identical output for identical
/// options; every emitted ID is < vertices.
void generate(const GenerateOptions& options, ByteSink& sink);
void generate_file(const GenerateOptions& options, const std::string& path);

}  // namespace compbin

#endif  // COMPBIN_GENERATE_HPP
