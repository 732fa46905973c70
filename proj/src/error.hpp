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

#ifndef COMPBIN_ERROR_HPP
#define COMPBIN_ERROR_HPP

#include <cstdint>
#include <stdexcept>
#include <string>

namespace compbin {

enum class Errc {
  invalid_argument,
  invalid_graph,
  bounds,
  encode_overflow,
  format,
  io,
  parse,
  range,
  busy,
  unsupported,
  failed,
};

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& msg) : std::runtime_error(msg), code_(code) {}
  Errc code() const { return code_; }

 private:
  Errc code_;
};

/// I/O failure carrying how many bytes completed before the fault.
class ReadError : public Error {
 public:
  ReadError(const std::string& msg, uint64_t bytes_completed)
      : Error(Errc::io, msg), bytes_completed_(bytes_completed) {}
  uint64_t bytes_completed() const { return bytes_completed_; }

 private:
  uint64_t bytes_completed_ = 0;
};

[[noreturn]] inline void fail(Errc code, const std::string& msg) { throw Error(code, msg); }

}  // namespace compbin

#endif  // COMPBIN_ERROR_HPP
