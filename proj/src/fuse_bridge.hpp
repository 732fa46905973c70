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

#ifndef COMPBIN_FUSE_BRIDGE_HPP
#define COMPBIN_FUSE_BRIDGE_HPP

#include <atomic>
#include <cstdint>
#include <memory>
#include <string>
#include <thread>
#include <vector>

#include "block_cache.hpp"

namespace compbin {

struct MountConfig {
  CacheConfig cache;
  uint32_t dispatcher_threads = 2;
};

// Read-only userspace filesystem that exports registered files as a flat
// directory of basenames, serving every kernel read through the block cache.
// The mount talks to the kernel FUSE device directly; no libfuse involved.
// Only lookup/getattr/open/read/release (and directory listing) are
// implemented; write-type operations return EROFS, everything else ENOSYS.
class MountSession {
 public:
  /// Registers each file with the cache and mounts. The mountpoint must be
  /// an existing empty directory; basenames must be unique.
  static std::unique_ptr<MountSession> mount(const std::vector<std::string>& files,
                                             const std::string& mountpoint,
                                             const MountConfig& config);

  ~MountSession();
  MountSession(const MountSession&) = delete;
  MountSession& operator=(const MountSession&) = delete;

  /// Detaches the filesystem and releases all cached memory. Counter
  /// snapshots survive for reporting. Returns false when already unmounted
  /// (the call is then a no-op). Throws Errc::busy while open handles remain.
  bool unmount();

  bool mounted() const { return mounted_; }
  /// True while the kernel channel is alive. Goes false once the mountpoint
  /// is unmounted, including by another process.
  bool serving() const { return mounted_ && !channel_dead_.load(std::memory_order_acquire); }
  const std::string& mountpoint() const { return mountpoint_; }
  std::vector<std::string> exported_names() const;

  /// Live counters while mounted; the final snapshot afterwards.
  CacheCounters counters(const std::string& name) const;

  /// Serves kernel requests until unmounted. The mount() factory starts
  /// dispatcher threads already; this is only for single-threaded callers
  /// like a foreground CLI that wants to donate its own thread.
  void serve_on_caller();

 private:
  struct Export {
    std::string name;
    std::shared_ptr<CachedFile> file;
    CacheCounters snapshot;
    uint64_t mtime = 0;
  };

  MountSession() = default;

  void dispatch_loop();
  bool handle_one(std::vector<std::byte>& buf);
  const Export* by_nodeid(uint64_t nodeid) const;

  std::string mountpoint_;
  std::vector<Export> exports_;
  int fuse_fd_ = -1;
  bool mounted_ = false;
  std::atomic<bool> channel_dead_{false};
  std::vector<std::thread> dispatchers_;
  uint32_t max_readahead_ = 128 * 1024;
};

/// True when this host can create FUSE mounts (device node present and a
/// probe mount succeeds).
bool fuse_available();

/// Unmounts a path mounted by another process. Throws Errc::busy when the
/// mount has open handles.
void unmount_path(const std::string& mountpoint);

}  // namespace compbin

#endif  // COMPBIN_FUSE_BRIDGE_HPP
