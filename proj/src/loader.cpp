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

#include "loader.hpp"

#include <deque>
#include <thread>
#include <vector>

#include "error.hpp"

namespace compbin {

struct LoadTicketAccess {
  static void set_progress(LoadTicket& t, uint64_t edges) {
    t.progress_.store(edges, std::memory_order_release);
  }
  static void complete(LoadTicket& t, LoadTicket::State s, std::string err) {
    t.complete(s, std::move(err));
  }
};

namespace {

// Shared worker pool for non-blocking tickets (one worker runs one ticket at
// a time). Lazily started; resizable between submissions.
class WorkerPool {
 public:
  static WorkerPool& instance() {
    // Intentionally leaked: workers are detached and may outlive static
    // destruction, so the pool's primitives must never be destroyed.
    static WorkerPool* pool = new WorkerPool();
    return *pool;
  }

  void submit(std::function<void()> job) {
    {
      std::lock_guard lock(mu_);
      ensure_started_locked();
      queue_.push_back(std::move(job));
    }
    cv_.notify_one();
  }

  void resize(unsigned threads) {
    std::lock_guard lock(mu_);
    target_ = threads == 0 ? 1 : threads;
  }

 private:
  WorkerPool() {
    unsigned hw = std::thread::hardware_concurrency();
    target_ = hw == 0 ? 2 : std::min(hw, 8u);
  }

  void ensure_started_locked() {
    while (workers_.size() < target_) {
      workers_.emplace_back([this] { run(); });
      workers_.back().detach();
    }
  }

  void run() {
    for (;;) {
      std::function<void()> job;
      {
        std::unique_lock lock(mu_);
        cv_.wait(lock, [this] { return !queue_.empty(); });
        job = std::move(queue_.front());
        queue_.pop_front();
      }
      job();
    }
  }

  std::mutex mu_;
  std::condition_variable cv_;
  std::deque<std::function<void()>> queue_;
  std::vector<std::thread> workers_;
  unsigned target_ = 2;
};

void run_load(const Graph& graph, uint64_t begin, uint64_t end, uint64_t capacity,
              const EdgeCallback& callback, LoadTicket& ticket) {
  const unsigned b = graph.id_bytes();
  const std::byte* mapped = graph.mapped_neighbors();
  std::vector<uint64_t> ids(capacity);
  std::vector<std::byte> raw;
  if (mapped == nullptr) raw.resize(capacity * b);

  uint64_t delivered = 0;
  try {
    for (uint64_t v = begin; v < end; ++v) {
      const uint64_t deg = graph.offset_at(v + 1) - graph.offset_at(v);
      uint64_t done = 0;
      while (done < deg) {
        const uint64_t take = std::min(deg - done, capacity);
        const uint64_t edge_index = graph.offset_at(v) + done;
        const std::byte* src;
        if (mapped != nullptr) {
          src = mapped + edge_index * b;
        } else {
          graph.read_neighbor_bytes(edge_index, take, raw.data());
          src = raw.data();
        }
        for (uint64_t i = 0; i < take; ++i) ids[i] = decode_id(src + i * b, b);
        callback(v, {ids.data(), take}, done > 0 ? kBatchContinuation : 0);
        done += take;
        delivered += take;
        LoadTicketAccess::set_progress(ticket, delivered);
      }
    }
  } catch (const std::exception& e) {
    callback(0, {}, kBatchFailed);
    LoadTicketAccess::complete(ticket, LoadTicket::State::failed, e.what());
    return;
  }
  LoadTicketAccess::complete(ticket, LoadTicket::State::done, {});
}

}  // namespace

LoadTicket::State LoadTicket::wait() {
  State s = state_.load(std::memory_order_acquire);
  if (s != State::pending) return s;
  std::unique_lock lock(mu_);
  cv_.wait(lock, [this] { return state_.load(std::memory_order_acquire) != State::pending; });
  return state_.load(std::memory_order_acquire);
}

std::string LoadTicket::error() const {
  std::lock_guard lock(mu_);
  return error_;
}

void LoadTicket::complete(State s, std::string err) {
  {
    std::lock_guard lock(mu_);
    error_ = std::move(err);
    state_.store(s, std::memory_order_release);
  }
  cv_.notify_all();
}

TicketPtr Loader::load_range(const Graph& graph, uint64_t begin, uint64_t end,
                             const LoadOptions& options, EdgeCallback callback) {
  if (begin > end || end > graph.vertices())
    fail(Errc::bounds, "vertex range [" + std::to_string(begin) + ", " + std::to_string(end) +
                           ") out of range");
  if (options.buffer_capacity == 0) fail(Errc::invalid_argument, "buffer_capacity must be >= 1");
  if (!callback) fail(Errc::invalid_argument, "callback must be set");

  auto ticket = std::make_shared<LoadTicket>();
  if (options.nonblocking) {
    // The Graph handle is copied into the job: handles are immutable after
    // open and share the underlying source.
    Graph copy = graph;
    WorkerPool::instance().submit(
        [copy = std::move(copy), begin, end, capacity = options.buffer_capacity,
         cb = std::move(callback), ticket] { run_load(copy, begin, end, capacity, cb, *ticket); });
  } else {
    run_load(graph, begin, end, options.buffer_capacity, callback, *ticket);
  }
  return ticket;
}

TicketPtr Loader::load_whole(const Graph& graph, const LoadOptions& options,
                             EdgeCallback callback) {
  return load_range(graph, 0, graph.vertices(), options, std::move(callback));
}

void Loader::set_pool_size(unsigned threads) { WorkerPool::instance().resize(threads); }

}  // namespace compbin
