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

// Mount tests run only on hosts where a FUSE probe mount succeeds; elsewhere
// each case logs a skip and passes vacuously.

#include <doctest.h>

#include <fcntl.h>
#include <sys/stat.h>
#include <unistd.h>

#include <filesystem>
#include <fstream>
#include <vector>

#include "error.hpp"
#include "fuse_bridge.hpp"
#include "support/oracle.hpp"

using namespace compbin;
using testsupport::TempDir;

namespace {

bool fuse_or_skip() {
  static const bool available = fuse_available();
  if (!available) MESSAGE("no usable FUSE device; skipping mount test");
  return available;
}

MountConfig small_mount_config() {
  MountConfig mc;
  mc.cache.block_size = 64 * 1024;
  mc.cache.memory_budget = 1024 * 1024;
  return mc;
}

std::vector<std::byte> read_all(const std::string& path) {
  std::vector<std::byte> out;
  int fd = ::open(path.c_str(), O_RDONLY);
  REQUIRE(fd >= 0);
  std::byte buf[65536];
  for (;;) {
    ssize_t n = ::read(fd, buf, sizeof buf);
    REQUIRE(n >= 0);
    if (n == 0) break;
    out.insert(out.end(), buf, buf + n);
  }
  ::close(fd);
  return out;
}

}  // namespace

TEST_CASE("mounted files read byte-identical to their backing") {
  if (!fuse_or_skip()) return;
  TempDir dir("fuse-bytes");
  TempDir mp("fuse-mp");
  const std::string backing = dir.file("data.bin");
  testsupport::write_pseudorandom_file(backing, 1 * 1024 * 1024 + 12345, 31);

  auto session = MountSession::mount({backing}, mp.path().string(), small_mount_config());
  const std::string exported = mp.file("data.bin");

  // stat sees the backing size.
  struct stat st {};
  REQUIRE(::stat(exported.c_str(), &st) == 0);
  CHECK(static_cast<uint64_t>(st.st_size) == 1 * 1024 * 1024 + 12345);
  CHECK((st.st_mode & S_IFMT) == S_IFREG);

  // Full read through the kernel equals the pseudorandom definition.
  std::vector<std::byte> through_mount = read_all(exported);
  REQUIRE(through_mount.size() == 1 * 1024 * 1024 + 12345);
  CHECK(testsupport::matches_pseudorandom(through_mount.data(), 0, through_mount.size(), 31));

  // Served through the cache: at most one backing read per block.
  CacheCounters counters = session->counters("data.bin");
  CHECK(counters.backing_reads <= (1 * 1024 * 1024 + 12345 + 65535) / 65536);
  CHECK(counters.backing_reads >= 1);

  // Random positioned reads match too.
  int fd = ::open(exported.c_str(), O_RDONLY);
  REQUIRE(fd >= 0);
  std::byte buf[777];
  REQUIRE(::pread(fd, buf, sizeof buf, 999999) == static_cast<ssize_t>(sizeof buf));
  CHECK(testsupport::matches_pseudorandom(buf, 999999, sizeof buf, 31));
  ::close(fd);

  CHECK(session->unmount());
}

TEST_CASE("directory listing shows exported basenames") {
  if (!fuse_or_skip()) return;
  TempDir dir("fuse-list");
  TempDir mp("fuse-mp");
  testsupport::write_pseudorandom_file(dir.file("alpha.bin"), 4096, 1);
  testsupport::write_pseudorandom_file(dir.file("beta.bin"), 8192, 2);

  auto session = MountSession::mount({dir.file("alpha.bin"), dir.file("beta.bin")},
                                     mp.path().string(), small_mount_config());
  std::vector<std::string> seen;
  for (const auto& entry : std::filesystem::directory_iterator(mp.path()))
    seen.push_back(entry.path().filename().string());
  std::sort(seen.begin(), seen.end());
  CHECK(seen == std::vector<std::string>{"alpha.bin", "beta.bin"});
  CHECK(std::filesystem::file_size(mp.file("beta.bin")) == 8192);
  session->unmount();
}

TEST_CASE("the mountpoint is read-only") {
  if (!fuse_or_skip()) return;
  TempDir dir("fuse-ro");
  TempDir mp("fuse-mp");
  const std::string backing = dir.file("data.bin");
  testsupport::write_pseudorandom_file(backing, 4096, 3);
  auto session = MountSession::mount({backing}, mp.path().string(), small_mount_config());

  const std::string exported = mp.file("data.bin");
  CHECK(::open(exported.c_str(), O_WRONLY) == -1);
  CHECK(::open(exported.c_str(), O_RDWR) == -1);
  CHECK(::open(mp.file("new.bin").c_str(), O_CREAT | O_WRONLY, 0644) == -1);
  CHECK(::truncate(exported.c_str(), 10) == -1);
  CHECK(::unlink(exported.c_str()) == -1);
  CHECK(::mkdir(mp.file("sub").c_str(), 0755) == -1);
  CHECK(::rename(exported.c_str(), mp.file("renamed").c_str()) == -1);

  // Reads still fine afterwards.
  std::vector<std::byte> bytes = read_all(exported);
  CHECK(bytes.size() == 4096);
  session->unmount();
}

TEST_CASE("unmount is idempotent, reports busy, and releases memory") {
  if (!fuse_or_skip()) return;
  TempDir dir("fuse-unmount");
  TempDir mp("fuse-mp");
  const std::string backing = dir.file("data.bin");
  testsupport::write_pseudorandom_file(backing, 256 * 1024, 4);
  auto session = MountSession::mount({backing}, mp.path().string(), small_mount_config());

  const std::string exported = mp.file("data.bin");
  int fd = ::open(exported.c_str(), O_RDONLY);
  REQUIRE(fd >= 0);
  std::byte buf[64];
  REQUIRE(::read(fd, buf, sizeof buf) == 64);

  // Open handle: unmount refuses with busy.
  CHECK_THROWS_AS(session->unmount(), Error);
  CHECK(session->mounted());
  ::close(fd);

  CHECK(session->unmount());
  CHECK(session->counters("data.bin").resident_bytes == 0);
  CHECK(session->counters("data.bin").backing_reads >= 1);  // snapshot retained
  CHECK_FALSE(session->unmount());  // second call is a no-op
  CHECK_FALSE(session->mounted());
  CHECK(std::filesystem::is_empty(mp.path()));
}

TEST_CASE("repeated mount cycles hold no memory") {
  if (!fuse_or_skip()) return;
  TempDir dir("fuse-cycles");
  TempDir mp("fuse-mp");
  const std::string backing = dir.file("data.bin");
  testsupport::write_pseudorandom_file(backing, 128 * 1024, 5);

  std::vector<std::byte> first;
  for (int cycle = 0; cycle < 25; ++cycle) {
    auto session = MountSession::mount({backing}, mp.path().string(), small_mount_config());
    std::vector<std::byte> bytes = read_all(mp.file("data.bin"));
    if (cycle == 0)
      first = bytes;
    else
      CHECK(bytes == first);
    session->unmount();
    CHECK(session->counters("data.bin").resident_bytes == 0);
  }
}

TEST_CASE("mount rejects bad configurations") {
  if (!fuse_or_skip()) return;
  TempDir dir("fuse-bad");
  TempDir mp("fuse-mp");
  testsupport::write_pseudorandom_file(dir.file("same.bin"), 4096, 6);
  std::filesystem::create_directory(dir.path() / "sub");
  testsupport::write_pseudorandom_file((dir.path() / "sub" / "same.bin").string(), 4096, 7);

  // Duplicate basenames.
  CHECK_THROWS_AS(MountSession::mount({dir.file("same.bin"), (dir.path() / "sub" / "same.bin").string()},
                                      mp.path().string(), small_mount_config()),
                  Error);
  // Missing backing file.
  CHECK_THROWS_AS(MountSession::mount({dir.file("absent.bin")}, mp.path().string(),
                                      small_mount_config()),
                  Error);
  // Non-empty mountpoint.
  auto session = MountSession::mount({dir.file("same.bin")}, mp.path().string(),
                                     small_mount_config());
  CHECK_THROWS_AS(MountSession::mount({dir.file("same.bin")}, mp.path().string(),
                                      small_mount_config()),
                  Error);
  session->unmount();

  // Nothing to mount.
  CHECK_THROWS_AS(MountSession::mount({}, mp.path().string(), small_mount_config()), Error);
}

TEST_CASE("external unmount stops the serving loop") {
  if (!fuse_or_skip()) return;
  TempDir dir("fuse-ext");
  TempDir mp("fuse-mp");
  const std::string backing = dir.file("data.bin");
  testsupport::write_pseudorandom_file(backing, 4096, 8);
  auto session = MountSession::mount({backing}, mp.path().string(), small_mount_config());
  CHECK(session->serving());

  unmount_path(mp.path().string());
  for (int i = 0; i < 100 && session->serving(); ++i)
    std::this_thread::sleep_for(std::chrono::milliseconds(10));
  CHECK_FALSE(session->serving());
  // Cleanup after the external unmount is a normal local unmount.
  CHECK(session->unmount());
}
