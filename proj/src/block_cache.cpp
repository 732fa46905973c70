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

#include "block_cache.hpp"

#include <fcntl.h>
#include <sys/stat.h>
#include <unistd.h>

#include <bit>
#include <cassert>
#include <cerrno>
#include <cstring>
#include <thread>

#include "error.hpp"

namespace compbin {

namespace {

void validate_config(const CacheConfig& config) {
  if (config.block_size < 4096 || !std::has_single_bit(config.block_size))
    fail(Errc::invalid_argument, "block_size must be a power of two >= 4096");
  if (config.memory_budget < config.block_size)
    fail(Errc::invalid_argument, "memory_budget must be at least one block");
}

// Backing reader over a file descriptor, shared by every block of the file.
class FdReader {
 public:
  explicit FdReader(const std::string& path) : path_(path) {
    fd_ = ::open(path.c_str(), O_RDONLY);
    if (fd_ < 0) fail(Errc::io, "cannot open '" + path + "': " + std::strerror(errno));
  }
  ~FdReader() {
    if (fd_ >= 0) ::close(fd_);
  }
  uint64_t size() const {
    struct stat st {};
    if (::fstat(fd_, &st) != 0)
      fail(Errc::io, "cannot stat '" + path_ + "': " + std::strerror(errno));
    return static_cast<uint64_t>(st.st_size);
  }
  void operator()(uint64_t offset, std::span<std::byte> dst) const {
    std::byte* p = dst.data();
    size_t left = dst.size();
    uint64_t pos = offset;
    while (left > 0) {
      ssize_t n = ::pread(fd_, p, left, static_cast<off_t>(pos));
      if (n < 0) {
        if (errno == EINTR) continue;
        fail(Errc::io, "read of '" + path_ + "' failed at offset " + std::to_string(pos) + ": " +
                           std::strerror(errno));
      }
      if (n == 0)
        fail(Errc::io, "unexpected end of '" + path_ + "' at offset " + std::to_string(pos));
      p += n;
      left -= static_cast<size_t>(n);
      pos += static_cast<uint64_t>(n);
    }
  }

 private:
  std::string path_;
  int fd_ = -1;
};

}  // namespace

CachedFile::CachedFile(uint64_t length, const CacheConfig& config, BackingReader reader)
    : config_(config), length_(length), backing_(std::move(reader)) {
  const uint64_t count = (length_ + config_.block_size - 1) / config_.block_size;
  blocks_ = std::vector<CacheBlock>(count);
}

std::shared_ptr<CachedFile> CachedFile::open(const std::string& path, const CacheConfig& config) {
  validate_config(config);
  auto reader = std::make_shared<FdReader>(path);
  uint64_t length = reader->size();
  return std::shared_ptr<CachedFile>(new CachedFile(
      length, config, [reader](uint64_t offset, std::span<std::byte> dst) { (*reader)(offset, dst); }));
}

std::shared_ptr<CachedFile> CachedFile::with_reader(uint64_t length, const CacheConfig& config,
                                                    BackingReader reader) {
  validate_config(config);
  return std::shared_ptr<CachedFile>(new CachedFile(length, config, std::move(reader)));
}

CachedFile::~CachedFile() {
  // Teardown without the quiescence check; buffers die with the object.
  closed_.store(true, std::memory_order_release);
}

uint64_t CachedFile::block_bytes(uint64_t block_index) const {
  uint64_t start = block_index * config_.block_size;
  return std::min(config_.block_size, length_ - start);
}

int32_t CachedFile::status_of(uint64_t block_index) const {
  return blocks_[block_index].status.load(std::memory_order_acquire);
}

void CachedFile::note_status(int32_t s) {
  if (s < kRevoking) invariant_violations_.fetch_add(1, std::memory_order_relaxed);
}

void CachedFile::wait_step(uint32_t& spins) {
  if (spins < config_.spin_iterations) {
    ++spins;
#if defined(__x86_64__) || defined(__i386__)
    __builtin_ia32_pause();
#endif
  } else {
    std::this_thread::yield();
  }
}

CachedFile::Lease& CachedFile::Lease::operator=(Lease&& o) noexcept {
  if (this != &o) {
    reset();
    file_ = o.file_;
    block_ = o.block_;
    data_ = o.data_;
    size_ = o.size_;
    o.file_ = nullptr;
    o.data_ = nullptr;
    o.size_ = 0;
  }
  return *this;
}

void CachedFile::Lease::reset() {
  if (file_ != nullptr) {
    file_->release(block_);
    file_ = nullptr;
    data_ = nullptr;
    size_ = 0;
  }
}

CachedFile::Lease CachedFile::acquire(uint64_t block_index) {
  if (closed_.load(std::memory_order_acquire))
    fail(Errc::invalid_argument, "cached file has been unregistered");
  if (block_index >= blocks_.size())
    fail(Errc::bounds, "block index " + std::to_string(block_index) + " out of range");

  CacheBlock& blk = blocks_[block_index];
  uint32_t spins = 0;
  bool waited = false;
  bool have_snapshot = false;
  uint64_t attempt_snapshot = 0;

  for (;;) {
    int32_t s = blk.status.load(std::memory_order_acquire);
    note_status(s);

    if (s >= 0) {
      if (blk.status.compare_exchange_weak(s, s + 1, std::memory_order_acq_rel,
                                           std::memory_order_relaxed)) {
        cache_hits_.fetch_add(1, std::memory_order_relaxed);
        return Lease(this, block_index, blk.buffer.get(), block_bytes(block_index));
      }
      continue;
    }

    if (s == kNotLoaded) {
      // A waiter that watched a load attempt sees its failure here, before
      // anything would claim the retry.
      if (have_snapshot && blk.fail_seq.load(std::memory_order_acquire) >= attempt_snapshot)
        fail(Errc::io, "backing load of block " + std::to_string(block_index) +
                           " failed in a concurrent loader");
      int32_t expected = kNotLoaded;
      if (blk.status.compare_exchange_strong(expected, kLoading, std::memory_order_acq_rel,
                                             std::memory_order_relaxed))
        return load_block(blk, block_index);
      continue;
    }

    // Loading or revoking: wait per the spin-then-yield policy and retry.
    if (s == kLoading && !have_snapshot) {
      attempt_snapshot = blk.attempt.load(std::memory_order_acquire);
      have_snapshot = true;
    }
    if (!waited) {
      waited = true;
      wait_events_.fetch_add(1, std::memory_order_relaxed);
    }
    wait_step(spins);
  }
}

CachedFile::Lease CachedFile::load_block(CacheBlock& blk, uint64_t block_index) {
  const uint64_t bytes = block_bytes(block_index);
  const uint64_t attempt = blk.attempt.fetch_add(1, std::memory_order_acq_rel) + 1;
  admit(bytes);
  try {
    blk.buffer = std::make_unique<std::byte[]>(bytes);
    backing_(block_index * config_.block_size, {blk.buffer.get(), bytes});
  } catch (...) {
    blk.buffer.reset();
    resident_bytes_.fetch_sub(bytes, std::memory_order_acq_rel);
    blk.fail_seq.store(attempt, std::memory_order_release);
    blk.status.store(kNotLoaded, std::memory_order_release);
    throw;
  }
  backing_reads_.fetch_add(1, std::memory_order_relaxed);
  // The loader enters as the first reader, so a fresh block cannot be
  // revoked before its requester has read it.
  blk.status.store(1, std::memory_order_release);
  return Lease(this, block_index, blk.buffer.get(), bytes);
}

void CachedFile::admit(uint64_t bytes) {
  uint32_t spins = 0;
  for (;;) {
    uint64_t cur = resident_bytes_.load(std::memory_order_relaxed);
    if (cur + bytes <= config_.memory_budget) {
      if (resident_bytes_.compare_exchange_weak(cur, cur + bytes, std::memory_order_acq_rel,
                                                std::memory_order_relaxed))
        return;
      continue;
    }
    if (evict(cur + bytes - config_.memory_budget) > 0) continue;
    // Nothing evictable right now. Admission may overshoot the budget by at
    // most one block; beyond that, wait for readers to release.
    if (cur + bytes <= config_.memory_budget + config_.block_size) {
      if (resident_bytes_.compare_exchange_weak(cur, cur + bytes, std::memory_order_acq_rel,
                                                std::memory_order_relaxed))
        return;
      continue;
    }
    wait_step(spins);
  }
}

void CachedFile::release(uint64_t block_index) {
  CacheBlock& blk = blocks_[block_index];
  // Stamp before the decrement so an evictor can never observe this block
  // idle with a stale timestamp.
  blk.last_access.store(clock_.fetch_add(1, std::memory_order_relaxed),
                        std::memory_order_release);
  for (;;) {
    int32_t s = blk.status.load(std::memory_order_relaxed);
    if (s < 1) {
      // Release without a matching acquire; never drive the count below 0.
      assert(!"release without matching acquire");
      invariant_violations_.fetch_add(1, std::memory_order_relaxed);
      return;
    }
    if (blk.status.compare_exchange_weak(s, s - 1, std::memory_order_acq_rel,
                                         std::memory_order_relaxed))
      return;
  }
}

uint64_t CachedFile::read(uint64_t offset, std::span<std::byte> dst) {
  if (offset >= length_ || dst.empty()) return 0;
  const uint64_t total = std::min<uint64_t>(dst.size(), length_ - offset);
  uint64_t copied = 0;
  while (copied < total) {
    const uint64_t pos = offset + copied;
    const uint64_t block = pos / config_.block_size;
    const uint64_t in_block = pos % config_.block_size;
    const uint64_t take = std::min(total - copied, block_bytes(block) - in_block);
    try {
      Lease lease = acquire(block);
      std::memcpy(dst.data() + copied, lease.data() + in_block, take);
    } catch (const Error& e) {
      throw ReadError(std::string(e.what()) + " (after " + std::to_string(copied) +
                          " bytes copied)",
                      copied);
    }
    copied += take;
  }
  return total;
}

uint64_t CachedFile::evict(uint64_t needed) {
  uint64_t freed = 0;
  while (freed < needed) {
    uint64_t best = blocks_.size();
    uint64_t best_stamp = UINT64_MAX;
    for (uint64_t i = 0; i < blocks_.size(); ++i) {
      if (blocks_[i].status.load(std::memory_order_relaxed) != 0) continue;
      uint64_t stamp = blocks_[i].last_access.load(std::memory_order_relaxed);
      if (stamp < best_stamp) {
        best_stamp = stamp;
        best = i;
      }
    }
    if (best == blocks_.size()) break;  // no idle block left

    CacheBlock& blk = blocks_[best];
    int32_t expected = 0;
    if (!blk.status.compare_exchange_strong(expected, kRevoking, std::memory_order_acq_rel,
                                            std::memory_order_relaxed))
      continue;  // raced with a reader or another evictor; rescan
    const uint64_t bytes = block_bytes(best);
    blk.buffer.reset();
    resident_bytes_.fetch_sub(bytes, std::memory_order_acq_rel);
    evictions_.fetch_add(1, std::memory_order_relaxed);
    blk.status.store(kNotLoaded, std::memory_order_release);
    freed += bytes;
  }
  return freed;
}

void CachedFile::unregister() {
  if (closed_.load(std::memory_order_acquire)) return;
  for (uint64_t i = 0; i < blocks_.size(); ++i) {
    int32_t s = blocks_[i].status.load(std::memory_order_acquire);
    if (s != 0 && s != kNotLoaded)
      fail(Errc::busy, "block " + std::to_string(i) + " still in use (status " +
                           std::to_string(s) + ")");
  }
  closed_.store(true, std::memory_order_release);
  for (uint64_t i = 0; i < blocks_.size(); ++i) {
    if (blocks_[i].buffer) {
      blocks_[i].buffer.reset();
      resident_bytes_.fetch_sub(block_bytes(i), std::memory_order_acq_rel);
      blocks_[i].status.store(kNotLoaded, std::memory_order_release);
    }
  }
}

CacheCounters CachedFile::counters() const {
  CacheCounters c;
  c.backing_reads = backing_reads_.load(std::memory_order_relaxed);
  c.cache_hits = cache_hits_.load(std::memory_order_relaxed);
  c.wait_events = wait_events_.load(std::memory_order_relaxed);
  c.evictions = evictions_.load(std::memory_order_relaxed);
  c.resident_bytes = resident_bytes_.load(std::memory_order_relaxed);
  return c;
}

void CachedSource::read_at(uint64_t offset, std::span<std::byte> dst) const {
  uint64_t n = file_->read(offset, dst);
  if (n != dst.size())
    throw ReadError("cached read past end of file at offset " + std::to_string(offset), n);
}

}  // namespace compbin
