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

// pgfuse: export files read-only through the block cache as a userspace
// filesystem. `mount` serves in the foreground until the mountpoint is
// unmounted (Ctrl-C or `pgfuse umount <mountpoint>` from another shell).

#include <csignal>
#include <cstdio>
#include <ctime>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "compbin/compbin.h"

namespace {

volatile std::sig_atomic_t g_interrupted = 0;

void on_signal(int) { g_interrupted = 1; }

int fail_with(compbin_status status) {
  std::fprintf(stderr, "error (%s): %s\n", compbin_status_name(status), compbin_last_error());
  return 1;
}

int run_mount(const std::string& mountpoint, const std::vector<std::string>& files,
              uint64_t block_size, uint64_t budget) {
  compbin_cache_config config = compbin_cache_config_default();
  if (block_size > 0) config.block_size = block_size;
  if (budget > 0) config.memory_budget = budget;

  std::vector<const char*> paths;
  paths.reserve(files.size());
  for (const std::string& f : files) paths.push_back(f.c_str());

  compbin_mount* mount = nullptr;
  compbin_status rc =
      compbin_mount_create(paths.data(), paths.size(), mountpoint.c_str(), &config, &mount);
  if (rc != COMPBIN_OK) return fail_with(rc);

  std::fprintf(stderr, "mounted %zu file(s) at %s (block %llu, budget %llu)\n", files.size(),
               mountpoint.c_str(), static_cast<unsigned long long>(config.block_size),
               static_cast<unsigned long long>(config.memory_budget));
  std::fprintf(stderr, "serving; stop with Ctrl-C or `pgfuse umount %s`\n", mountpoint.c_str());

  std::signal(SIGINT, on_signal);
  std::signal(SIGTERM, on_signal);

  // Serve until a signal arrives or someone unmounts the path externally.
  while (!g_interrupted && compbin_mount_serving(mount)) {
    struct timespec ts = {0, 200 * 1000 * 1000};
    nanosleep(&ts, nullptr);
  }

  int changed = 0;
  rc = compbin_mount_unmount(mount, &changed);
  if (rc != COMPBIN_OK && rc != COMPBIN_ERR_BUSY) {
    compbin_mount_free(mount);
    return fail_with(rc);
  }
  for (const std::string& f : files) {
    compbin_cache_counters c{};
    std::string name = f.substr(f.find_last_of('/') + 1);
    if (compbin_mount_counters(mount, name.c_str(), &c) == COMPBIN_OK) {
      std::fprintf(stderr,
                   "%s: backing_reads=%llu cache_hits=%llu wait_events=%llu evictions=%llu\n",
                   name.c_str(), static_cast<unsigned long long>(c.backing_reads),
                   static_cast<unsigned long long>(c.cache_hits),
                   static_cast<unsigned long long>(c.wait_events),
                   static_cast<unsigned long long>(c.evictions));
    }
  }
  compbin_mount_free(mount);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Userspace filesystem bridge over the block cache"};
  app.require_subcommand(1);

  std::string mountpoint;
  std::vector<std::string> files;
  uint64_t block_size = 0;
  uint64_t budget = 0;

  auto* mount = app.add_subcommand("mount", "Mount files read-only at a directory");
  mount->add_option("--block-size", block_size, "cache block size in bytes (default 32 MiB)");
  mount->add_option("--budget", budget, "cache memory budget in bytes per file");
  mount->add_option("mountpoint", mountpoint, "empty directory to mount at")->required();
  mount->add_option("files", files, "files to export")->required()->expected(-1);

  auto* umount = app.add_subcommand("umount", "Unmount a pgfuse mountpoint");
  umount->add_option("mountpoint", mountpoint, "mounted directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;  // 0 for --help, 2 for usage errors
  }

  if (mount->parsed()) {
    if (!compbin_fuse_available()) {
      std::fprintf(stderr, "error: no usable FUSE device on this host\n");
      return 1;
    }
    return run_mount(mountpoint, files, block_size, budget);
  }
  if (umount->parsed()) {
    compbin_status rc = compbin_unmount_path(mountpoint.c_str());
    if (rc != COMPBIN_OK) return fail_with(rc);
    return 0;
  }
  return 2;
}
