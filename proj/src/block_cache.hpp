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

#ifndef COMPBIN_BLOCK_CACHE_HPP
#define COMPBIN_BLOCK_CACHE_HPP

#include <atomic>
#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "byte_io.hpp"

namespace compbin {

struct CacheConfig {
  uint64_t block_size = 32ull << 20;      // 32 MiB
  uint64_t memory_budget = 1ull << 30;    // max resident cached bytes
  uint32_t spin_iterations = 1024;        // bounded spin before yielding
};

struct CacheCounters {
  uint64_t backing_reads = 0;   // block loads issued to the backing store
  uint64_t cache_hits = 0;      // acquires satisfied without a load
  uint64_t wait_events = 0;     // acquires that waited on a loading/revoking block
  uint64_t evictions = 0;       // blocks revoked
  uint64_t resident_bytes = 0;  // currently allocated buffer bytes
};

// A concurrent block cache over one backing file. The file is split into
// fixed-size blocks (the last one possibly shorter); each block carries a
// signed status word driven purely by compare-and-swap:
//
//    -1  not loaded                    -1 -> -2   claim to load (CAS)
//    -2  a thread is loading it        -2 ->  1   load complete, loader holds
//    -3  being revoked                 -2 -> -1   load failed
//     0  loaded, idle                   k -> k+1  reader enters (k >= 0)
//    k>0 k readers hold the block       k -> k-1  reader leaves (k >= 1)
//                                       0 -> -3   eviction claims it
//                                      -3 -> -1   buffer freed
//
// Threads that observe -2 or -3 spin briefly, then yield, then retry. A
// buffer is only freed by the thread owning the -3 state, so a block can
// never disappear while some reader holds a positive count. Eviction picks
// the idle block with the oldest last-access stamp, and runs on admission
// whenever a load would push resident bytes over the budget; admission may
// overshoot the budget by at most one block when nothing is evictable.
class CachedFile {
 public:
  using BackingReader = std::function<void(uint64_t offset, std::span<std::byte> dst)>;

  /// Registers a backing file. All blocks start not-loaded with no buffers.
  /// Throws Errc::io if the file is missing or unreadable,
  /// Errc::invalid_argument on a bad config.
  static std::shared_ptr<CachedFile> open(const std::string& path, const CacheConfig& config);

  /// Test entry: a synthetic backing store served by reader.
  static std::shared_ptr<CachedFile> with_reader(uint64_t length, const CacheConfig& config,
                                                 BackingReader reader);

  ~CachedFile();
  CachedFile(const CachedFile&) = delete;
  CachedFile& operator=(const CachedFile&) = delete;

  uint64_t length() const { return length_; }
  uint64_t block_count() const { return blocks_.size(); }
  const CacheConfig& config() const { return config_; }

  /// RAII read lease. data() stays valid until the lease is destroyed.
  class Lease {
   public:
    Lease() = default;
    Lease(CachedFile* file, uint64_t block, const std::byte* data, uint64_t size)
        : file_(file), block_(block), data_(data), size_(size) {}
    Lease(Lease&& o) noexcept { *this = std::move(o); }
    Lease& operator=(Lease&& o) noexcept;
    ~Lease() { reset(); }
    void reset();
    /// Abandons ownership without releasing the block; the holder must pair
    /// it with an explicit CachedFile::release later.
    void detach() {
      file_ = nullptr;
      data_ = nullptr;
      size_ = 0;
    }

    const std::byte* data() const { return data_; }
    uint64_t size() const { return size_; }
    uint64_t block_index() const { return block_; }
    explicit operator bool() const { return file_ != nullptr; }

   private:
    CachedFile* file_ = nullptr;
    uint64_t block_ = 0;
    const std::byte* data_ = nullptr;
    uint64_t size_ = 0;
  };

  /// Takes a read lease on a block, loading it from the backing store if
  /// needed. Exactly one backing read happens per load no matter how many
  /// threads arrive concurrently. A failed load restores the block to
  /// not-loaded and the error propagates to the waiters of that attempt.
  Lease acquire(uint64_t block_index);

  /// Drops one reader from the block's count and stamps its last access.
  void release(uint64_t block_index);

  /// Copies min(length, file_length - offset) bytes starting at offset into
  /// dst, acquiring each overlapped block in ascending order and releasing it
  /// before the next. Returns bytes copied; reads at or past the end return 0.
  /// A backing failure surfaces as ReadError carrying the completed count.
  uint64_t read(uint64_t offset, std::span<std::byte> dst);

  /// Frees idle blocks, oldest last-access first, until `needed` bytes are
  /// freed or no idle block remains. Returns bytes freed. Blocks with readers,
  /// loads, or revocations in flight are never touched.
  uint64_t evict(uint64_t needed);

  /// Releases every buffer and invalidates the handle. Throws Errc::busy if
  /// any block is still leased, loading, or being revoked.
  void unregister();

  CacheCounters counters() const;

  // Observability for tests and invariant checks.
  int32_t status_of(uint64_t block_index) const;
  uint64_t invariant_violations() const { return invariant_violations_.load(std::memory_order_relaxed); }
  uint64_t block_bytes(uint64_t block_index) const;

 private:
  struct CacheBlock {
    std::atomic<int32_t> status{kNotLoaded};
    std::atomic<uint64_t> last_access{0};
    std::atomic<uint64_t> attempt{0};   // load attempts started
    std::atomic<uint64_t> fail_seq{0};  // highest attempt that failed
    std::unique_ptr<std::byte[]> buffer;
  };

  static constexpr int32_t kNotLoaded = -1;
  static constexpr int32_t kLoading = -2;
  static constexpr int32_t kRevoking = -3;

  CachedFile(uint64_t length, const CacheConfig& config, BackingReader reader);

  Lease load_block(CacheBlock& blk, uint64_t block_index);
  void admit(uint64_t bytes);
  void wait_step(uint32_t& spins);
  void note_status(int32_t s);

  CacheConfig config_;
  uint64_t length_ = 0;
  BackingReader backing_;
  std::vector<CacheBlock> blocks_;
  std::atomic<bool> closed_{false};

  std::atomic<uint64_t> resident_bytes_{0};
  std::atomic<uint64_t> clock_{1};
  std::atomic<uint64_t> backing_reads_{0};
  std::atomic<uint64_t> cache_hits_{0};
  std::atomic<uint64_t> wait_events_{0};
  std::atomic<uint64_t> evictions_{0};
  std::atomic<uint64_t> invariant_violations_{0};
};

/// ByteSource adapter so graphs can be opened through the cache.
class CachedSource final : public ByteSource {
 public:
  explicit CachedSource(std::shared_ptr<CachedFile> file) : file_(std::move(file)) {}
  uint64_t size() const override { return file_->length(); }
  void read_at(uint64_t offset, std::span<std::byte> dst) const override;
  const std::shared_ptr<CachedFile>& file() const { return file_; }

 private:
  std::shared_ptr<CachedFile> file_;
};

}  // namespace compbin

#endif  // COMPBIN_BLOCK_CACHE_HPP
