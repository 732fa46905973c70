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

#include "fuse_bridge.hpp"

#include "error.hpp"

#ifdef __linux__

#include <fcntl.h>
#include <linux/fuse.h>
#include <sys/mount.h>
#include <sys/stat.h>
#include <sys/uio.h>
#include <unistd.h>

#include <cerrno>
#include <cstdio>
#include <cstring>
#include <filesystem>

namespace compbin {

namespace {

constexpr uint32_t kMaxWrite = 128 * 1024;
constexpr size_t kRequestBufSize = kMaxWrite + 128 * 1024;  // headers + data

std::string errno_text() { return std::strerror(errno); }

int open_fuse_device() { return ::open("/dev/fuse", O_RDWR | O_CLOEXEC); }

// Raw fuse mount: attach the opened /dev/fuse fd to the mountpoint. This is
// what fusermount does on our behalf when running unprivileged; with
// CAP_SYS_ADMIN the mount syscall can be issued directly.
bool kernel_mount(int fd, const std::string& mountpoint) {
  char data[256];
  std::snprintf(data, sizeof data,
                "fd=%d,rootmode=40000,user_id=%u,group_id=%u,max_read=%u", fd,
                static_cast<unsigned>(::getuid()), static_cast<unsigned>(::getgid()), kMaxWrite);
  return ::mount("pgfuse", mountpoint.c_str(), "fuse", MS_NOSUID | MS_NODEV, data) == 0;
}

void reply(int fd, uint64_t unique, int32_t error, const void* payload, size_t payload_len) {
  fuse_out_header out{};
  out.len = static_cast<uint32_t>(sizeof out + payload_len);
  out.error = error;
  out.unique = unique;
  iovec iov[2] = {{&out, sizeof out}, {const_cast<void*>(payload), payload_len}};
  // A failed reply means the request was aborted (or the fs unmounted);
  // nothing to do about it here.
  (void)!::writev(fd, iov, payload_len > 0 ? 2 : 1);
}

void reply_err(int fd, uint64_t unique, int err) { reply(fd, unique, -err, nullptr, 0); }

}  // namespace

std::unique_ptr<MountSession> MountSession::mount(const std::vector<std::string>& files,
                                                  const std::string& mountpoint,
                                                  const MountConfig& config) {
  namespace fs = std::filesystem;
  std::error_code ec;
  if (!fs::is_directory(mountpoint, ec))
    fail(Errc::invalid_argument, "mountpoint '" + mountpoint + "' is not a directory");
  if (fs::directory_iterator(mountpoint, ec) != fs::directory_iterator{})
    fail(Errc::invalid_argument, "mountpoint '" + mountpoint + "' is not empty");
  if (files.empty()) fail(Errc::invalid_argument, "nothing to mount");

  std::unique_ptr<MountSession> session(new MountSession);
  session->mountpoint_ = mountpoint;
  for (const std::string& path : files) {
    Export exp;
    exp.name = fs::path(path).filename().string();
    if (exp.name.empty()) fail(Errc::invalid_argument, "'" + path + "' has no basename");
    for (const Export& existing : session->exports_)
      if (existing.name == exp.name)
        fail(Errc::invalid_argument, "duplicate basename '" + exp.name + "'");
    exp.file = CachedFile::open(path, config.cache);
    struct stat st {};
    if (::stat(path.c_str(), &st) == 0) exp.mtime = static_cast<uint64_t>(st.st_mtime);
    session->exports_.push_back(std::move(exp));
  }

  session->fuse_fd_ = open_fuse_device();
  if (session->fuse_fd_ < 0)
    fail(Errc::unsupported, "cannot open /dev/fuse: " + errno_text());
  if (!kernel_mount(session->fuse_fd_, mountpoint)) {
    int saved = errno;
    ::close(session->fuse_fd_);
    session->fuse_fd_ = -1;
    fail(Errc::io, "mount of '" + mountpoint + "' failed: " + std::strerror(saved));
  }
  session->mounted_ = true;

  const uint32_t threads = std::max(1u, config.dispatcher_threads);
  for (uint32_t i = 0; i < threads; ++i)
    session->dispatchers_.emplace_back([raw = session.get()] { raw->dispatch_loop(); });
  return session;
}

MountSession::~MountSession() {
  if (mounted_) {
    // Force-detach so destruction never hangs on busy handles.
    ::umount2(mountpoint_.c_str(), MNT_DETACH);
    mounted_ = false;
  }
  for (auto& t : dispatchers_)
    if (t.joinable()) t.join();
  if (fuse_fd_ >= 0) ::close(fuse_fd_);
}

bool MountSession::unmount() {
  if (!mounted_) return false;
  if (::umount2(mountpoint_.c_str(), 0) != 0) {
    if (errno == EBUSY)
      fail(Errc::busy, "mountpoint '" + mountpoint_ +
                           "' is busy: close open handles under it and retry");
    // EINVAL / ENOENT: someone already unmounted it; just clean up locally.
    if (errno != EINVAL && errno != ENOENT)
      fail(Errc::io, "unmount of '" + mountpoint_ + "' failed: " + errno_text());
  }
  mounted_ = false;
  for (auto& t : dispatchers_)
    if (t.joinable()) t.join();
  dispatchers_.clear();
  ::close(fuse_fd_);
  fuse_fd_ = -1;
  for (Export& exp : exports_) {
    exp.snapshot = exp.file->counters();
    exp.snapshot.resident_bytes = 0;  // everything below is freed
    exp.file->unregister();
    exp.file.reset();
  }
  return true;
}

std::vector<std::string> MountSession::exported_names() const {
  std::vector<std::string> names;
  for (const Export& exp : exports_) names.push_back(exp.name);
  return names;
}

CacheCounters MountSession::counters(const std::string& name) const {
  for (const Export& exp : exports_) {
    if (exp.name != name) continue;
    return exp.file ? exp.file->counters() : exp.snapshot;
  }
  fail(Errc::invalid_argument, "no exported file named '" + name + "'");
}

const MountSession::Export* MountSession::by_nodeid(uint64_t nodeid) const {
  if (nodeid < 2 || nodeid - 2 >= exports_.size()) return nullptr;
  return &exports_[nodeid - 2];
}

void MountSession::serve_on_caller() { dispatch_loop(); }

void MountSession::dispatch_loop() {
  std::vector<std::byte> buf(kRequestBufSize);
  while (handle_one(buf)) {
  }
  channel_dead_.store(true, std::memory_order_release);
}

// Reads one kernel request and answers it. Returns false when the channel is
// gone (unmounted).
bool MountSession::handle_one(std::vector<std::byte>& buf) {
  const ssize_t n = ::read(fuse_fd_, buf.data(), buf.size());
  if (n < 0) {
    if (errno == EINTR || errno == EAGAIN || errno == ENOENT) return true;
    return false;  // ENODEV after unmount, or a dead channel
  }
  if (static_cast<size_t>(n) < sizeof(fuse_in_header)) return true;

  const auto* in = reinterpret_cast<const fuse_in_header*>(buf.data());
  const std::byte* arg = buf.data() + sizeof(fuse_in_header);
  const int fd = fuse_fd_;

  auto fill_attr = [this](uint64_t nodeid, fuse_attr& attr) {
    attr = {};
    attr.ino = nodeid;
    attr.blksize = 4096;
    attr.uid = ::getuid();
    attr.gid = ::getgid();
    if (nodeid == FUSE_ROOT_ID) {
      attr.mode = S_IFDIR | 0555;
      attr.nlink = 2;
      return;
    }
    const Export* exp = by_nodeid(nodeid);
    attr.mode = S_IFREG | 0444;
    attr.nlink = 1;
    attr.size = (exp != nullptr && exp->file) ? exp->file->length() : 0;
    attr.blocks = (attr.size + 511) / 512;
    if (exp != nullptr) attr.atime = attr.mtime = attr.ctime = exp->mtime;
  };

  switch (in->opcode) {
    case FUSE_INIT: {
      const auto* init = reinterpret_cast<const fuse_init_in*>(arg);
      fuse_init_out out{};
      out.major = FUSE_KERNEL_VERSION;
      if (init->major != FUSE_KERNEL_VERSION) {
        // Newer kernel major: reply with ours and the kernel re-sends INIT.
        reply(fd, in->unique, 0, &out, sizeof out);
        return true;
      }
      out.minor = std::min<uint32_t>(init->minor, FUSE_KERNEL_MINOR_VERSION);
      out.max_readahead = std::min(init->max_readahead, max_readahead_);
      out.flags = init->flags & (FUSE_ASYNC_READ | FUSE_PARALLEL_DIROPS);
      out.max_background = 16;
      out.congestion_threshold = 12;
      out.max_write = kMaxWrite;
      out.time_gran = 1;
      size_t out_len = sizeof out;
      if (init->minor < 5)
        out_len = FUSE_COMPAT_INIT_OUT_SIZE;
      else if (init->minor < 23)
        out_len = FUSE_COMPAT_22_INIT_OUT_SIZE;
      reply(fd, in->unique, 0, &out, out_len);
      return true;
    }

    case FUSE_LOOKUP: {
      if (in->nodeid != FUSE_ROOT_ID) {
        reply_err(fd, in->unique, ENOTDIR);
        return true;
      }
      const char* name = reinterpret_cast<const char*>(arg);
      for (size_t i = 0; i < exports_.size(); ++i) {
        if (exports_[i].name != name) continue;
        fuse_entry_out out{};
        out.nodeid = i + 2;
        out.attr_valid = 3600;
        out.entry_valid = 3600;
        fill_attr(i + 2, out.attr);
        reply(fd, in->unique, 0, &out, sizeof out);
        return true;
      }
      reply_err(fd, in->unique, ENOENT);
      return true;
    }

    case FUSE_GETATTR: {
      if (in->nodeid != FUSE_ROOT_ID && by_nodeid(in->nodeid) == nullptr) {
        reply_err(fd, in->unique, ENOENT);
        return true;
      }
      fuse_attr_out out{};
      out.attr_valid = 3600;
      fill_attr(in->nodeid, out.attr);
      reply(fd, in->unique, 0, &out, sizeof out);
      return true;
    }

    case FUSE_OPEN: {
      const auto* open_in = reinterpret_cast<const fuse_open_in*>(arg);
      if (by_nodeid(in->nodeid) == nullptr) {
        reply_err(fd, in->unique, ENOENT);
        return true;
      }
      if ((open_in->flags & O_ACCMODE) != O_RDONLY) {
        reply_err(fd, in->unique, EROFS);
        return true;
      }
      fuse_open_out out{};
      out.fh = in->nodeid;
      reply(fd, in->unique, 0, &out, sizeof out);
      return true;
    }

    case FUSE_READ: {
      const auto* read_in = reinterpret_cast<const fuse_read_in*>(arg);
      const Export* exp = by_nodeid(in->nodeid);
      if (exp == nullptr) {
        reply_err(fd, in->unique, EBADF);
        return true;
      }
      const uint32_t want = std::min(read_in->size, kMaxWrite);
      std::vector<std::byte> data(want);
      uint64_t got = 0;
      try {
        got = exp->file->read(read_in->offset, {data.data(), want});
      } catch (const Error&) {
        reply_err(fd, in->unique, EIO);
        return true;
      }
      reply(fd, in->unique, 0, data.data(), got);
      return true;
    }

    case FUSE_RELEASE:
    case FUSE_RELEASEDIR:
    case FUSE_FLUSH:
      reply(fd, in->unique, 0, nullptr, 0);
      return true;

    case FUSE_OPENDIR: {
      if (in->nodeid != FUSE_ROOT_ID) {
        reply_err(fd, in->unique, ENOTDIR);
        return true;
      }
      fuse_open_out out{};
      reply(fd, in->unique, 0, &out, sizeof out);
      return true;
    }

    case FUSE_READDIR: {
      const auto* read_in = reinterpret_cast<const fuse_read_in*>(arg);
      if (in->nodeid != FUSE_ROOT_ID) {
        reply_err(fd, in->unique, ENOTDIR);
        return true;
      }
      std::vector<std::byte> out;
      uint64_t index = read_in->offset;  // resume cookie: next entry index
      const uint64_t total = 2 + exports_.size();
      while (index < total && out.size() < read_in->size) {
        const char* name;
        uint64_t ino;
        uint32_t type;
        if (index == 0) {
          name = ".";
          ino = FUSE_ROOT_ID;
          type = S_IFDIR >> 12;
        } else if (index == 1) {
          name = "..";
          ino = FUSE_ROOT_ID;
          type = S_IFDIR >> 12;
        } else {
          name = exports_[index - 2].name.c_str();
          ino = index;
          type = S_IFREG >> 12;
        }
        const uint32_t namelen = static_cast<uint32_t>(std::strlen(name));
        const size_t entry_len = FUSE_DIRENT_ALIGN(FUSE_NAME_OFFSET + namelen);
        if (out.size() + entry_len > read_in->size) break;
        fuse_dirent ent{};
        ent.ino = ino;
        ent.off = index + 1;
        ent.namelen = namelen;
        ent.type = type;
        const size_t pos = out.size();
        out.resize(pos + entry_len, std::byte{0});
        std::memcpy(out.data() + pos, &ent, FUSE_NAME_OFFSET);
        std::memcpy(out.data() + pos + FUSE_NAME_OFFSET, name, namelen);
        ++index;
      }
      reply(fd, in->unique, 0, out.data(), out.size());
      return true;
    }

    case FUSE_STATFS: {
      fuse_statfs_out out{};
      uint64_t bytes = 0;
      for (const Export& exp : exports_) bytes += exp.file ? exp.file->length() : 0;
      out.st.bsize = 4096;
      out.st.frsize = 4096;
      out.st.blocks = bytes / 4096;
      out.st.files = exports_.size() + 1;
      out.st.namelen = 255;
      reply(fd, in->unique, 0, &out, sizeof out);
      return true;
    }

    case FUSE_ACCESS: {
      const auto* access_in = reinterpret_cast<const fuse_access_in*>(arg);
      reply_err(fd, in->unique, (access_in->mask & W_OK) != 0 ? EROFS : 0);
      return true;
    }

    case FUSE_FORGET:
    case FUSE_BATCH_FORGET:
    case FUSE_INTERRUPT:
      return true;  // no reply by protocol

    case FUSE_DESTROY:
      reply(fd, in->unique, 0, nullptr, 0);
      return true;

    // Anything that would mutate the namespace or file contents.
    case FUSE_SETATTR:
    case FUSE_MKNOD:
    case FUSE_MKDIR:
    case FUSE_UNLINK:
    case FUSE_RMDIR:
    case FUSE_SYMLINK:
    case FUSE_RENAME:
    case FUSE_RENAME2:
    case FUSE_LINK:
    case FUSE_WRITE:
    case FUSE_CREATE:
    case FUSE_FALLOCATE:
    case FUSE_SETXATTR:
    case FUSE_REMOVEXATTR:
    case FUSE_COPY_FILE_RANGE:
      reply_err(fd, in->unique, EROFS);
      return true;

    default:
      reply_err(fd, in->unique, ENOSYS);
      return true;
  }
}

bool fuse_available() {
  int fd = open_fuse_device();
  if (fd < 0) return false;
  char tmpl[] = "/tmp/pgfuse-probe-XXXXXX";
  char* dir = ::mkdtemp(tmpl);
  if (dir == nullptr) {
    ::close(fd);
    return false;
  }
  const bool ok = kernel_mount(fd, dir);
  if (ok) ::umount2(dir, MNT_DETACH);
  ::close(fd);
  ::rmdir(dir);
  return ok;
}

void unmount_path(const std::string& mountpoint) {
  if (::umount2(mountpoint.c_str(), 0) == 0) return;
  if (errno == EBUSY)
    fail(Errc::busy,
         "mountpoint '" + mountpoint + "' is busy: close open handles under it and retry");
  fail(Errc::io, "unmount of '" + mountpoint + "' failed: " + errno_text());
}

}  // namespace compbin

#else  // !__linux__

namespace compbin {

std::unique_ptr<MountSession> MountSession::mount(const std::vector<std::string>&,
                                                  const std::string&, const MountConfig&) {
  fail(Errc::unsupported, "userspace filesystem mounts are only supported on Linux");
}
MountSession::~MountSession() = default;
bool MountSession::unmount() { return false; }
std::vector<std::string> MountSession::exported_names() const { return {}; }
CacheCounters MountSession::counters(const std::string&) const { return {}; }
void MountSession::serve_on_caller() {}
void MountSession::dispatch_loop() {}
bool MountSession::handle_one(std::vector<std::byte>&) { return false; }
const MountSession::Export* MountSession::by_nodeid(uint64_t) const { return nullptr; }
bool fuse_available() { return false; }
void unmount_path(const std::string&) {
  fail(Errc::unsupported, "userspace filesystem mounts are only supported on Linux");
}

}  // namespace compbin

#endif  // __linux__
