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

#ifndef COMPBIN_LOADER_HPP
#define COMPBIN_LOADER_HPP

#include <atomic>
#include <condition_variable>
#include <cstdint>
#include <functional>
#include <memory>
#include <mutex>
#include <span>
#include <string>

#include "format.hpp"

namespace compbin {

// Batch flags passed to the edge callback.
inline constexpr uint32_t kBatchContinuation = 1u << 0;  // same vertex continues
inline constexpr uint32_t kBatchFailed = 1u << 1;        // terminal error notification

/// Delivery callback. `neighbors` points into a buffer owned by the loader
/// and is valid only for the duration of the call. On failure the loader
/// makes one final call with kBatchFailed set and an empty span, then the
/// ticket reports the error.
using EdgeCallback =
    std::function<void(uint64_t vertex, std::span<const uint64_t> neighbors, uint32_t flags)>;

struct LoadOptions {
  bool nonblocking = false;
  uint64_t buffer_capacity = 65536;  // decoded edges per delivery
};

class LoadTicket {
 public:
  enum class State { pending, done, failed };

  /// Blocks until the load finishes. Idempotent; safe from any thread.
  State wait();
  State state() const { return state_.load(std::memory_order_acquire); }
  uint64_t progress() const { return progress_.load(std::memory_order_acquire); }
  std::string error() const;

 private:
  friend struct LoadTicketAccess;

  void complete(State s, std::string err);

  std::atomic<State> state_{State::pending};
  std::atomic<uint64_t> progress_{0};
  mutable std::mutex mu_;
  std::condition_variable cv_;
  std::string error_;
};

using TicketPtr = std::shared_ptr<LoadTicket>;

class Loader {
 public:
  /// Delivers every edge (v, u) with v in [begin, end) to the callback,
  /// vertices ascending, neighbors in storage order. A vertex whose degree
  /// exceeds buffer_capacity arrives in consecutive calls flagged as
  /// continuations. Blocking mode returns after the final callback;
  /// non-blocking returns a pending ticket served by the shared worker pool.
  static TicketPtr load_range(const Graph& graph, uint64_t begin, uint64_t end,
                              const LoadOptions& options, EdgeCallback callback);

  static TicketPtr load_whole(const Graph& graph, const LoadOptions& options,
                              EdgeCallback callback);

  /// Resizes the shared pool used for non-blocking tickets. Takes effect for
  /// tickets submitted after the call.
  static void set_pool_size(unsigned threads);
};

}  // namespace compbin

#endif  // COMPBIN_LOADER_HPP
