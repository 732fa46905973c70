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

#include "byte_io.hpp"

#include <fcntl.h>
#include <sys/mman.h>
#include <sys/stat.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>

#include "error.hpp"

namespace compbin {

namespace {
std::string errno_text() { return std::strerror(errno); }
}  // namespace

MmapSource::MmapSource(const std::string& path) {
  int fd = ::open(path.c_str(), O_RDONLY);
  if (fd < 0) fail(Errc::io, "cannot open '" + path + "': " + errno_text());
  struct stat st {};
  if (::fstat(fd, &st) != 0) {
    int saved = errno;
    ::close(fd);
    fail(Errc::io, "cannot stat '" + path + "': " + std::strerror(saved));
  }
  size_ = static_cast<uint64_t>(st.st_size);
  if (size_ > 0) {
    void* p = ::mmap(nullptr, size_, PROT_READ, MAP_PRIVATE, fd, 0);
    if (p == MAP_FAILED) {
      int saved = errno;
      ::close(fd);
      fail(Errc::io, "cannot map '" + path + "': " + std::strerror(saved));
    }
    base_ = static_cast<std::byte*>(p);
  }
  ::close(fd);
}

MmapSource::~MmapSource() {
  if (base_ != nullptr) ::munmap(base_, size_);
}

void MmapSource::read_at(uint64_t offset, std::span<std::byte> dst) const {
  if (offset > size_ || dst.size() > size_ - offset)
    throw ReadError("read past end of mapped source", 0);
  std::memcpy(dst.data(), base_ + offset, dst.size());
}

void MemorySource::read_at(uint64_t offset, std::span<std::byte> dst) const {
  if (offset > data_.size() || dst.size() > data_.size() - offset)
    throw ReadError("read past end of memory source", 0);
  std::memcpy(dst.data(), data_.data() + offset, dst.size());
}

FileSink::FileSink(const std::string& path) : path_(path) {
  fd_ = ::open(path.c_str(), O_WRONLY | O_CREAT | O_TRUNC, 0644);
  if (fd_ < 0) fail(Errc::io, "cannot create '" + path + "': " + errno_text());
}

FileSink::~FileSink() {
  if (fd_ >= 0) ::close(fd_);
}

void FileSink::write(std::span<const std::byte> data) {
  const std::byte* p = data.data();
  size_t left = data.size();
  while (left > 0) {
    ssize_t n = ::write(fd_, p, left);
    if (n < 0) {
      if (errno == EINTR) continue;
      fail(Errc::io, "write to '" + path_ + "' failed at byte " + std::to_string(written_) +
                         ": " + errno_text());
    }
    p += n;
    left -= static_cast<size_t>(n);
    written_ += static_cast<uint64_t>(n);
  }
}

void FileSink::close() {
  if (fd_ >= 0) {
    int rc = ::close(fd_);
    fd_ = -1;
    if (rc != 0) fail(Errc::io, "close of '" + path_ + "' failed: " + errno_text());
  }
}

void MemorySink::write(std::span<const std::byte> data) {
  data_.insert(data_.end(), data.begin(), data.end());
  written_ += data.size();
}

uint64_t file_size_of(const std::string& path) {
  struct stat st {};
  if (::stat(path.c_str(), &st) != 0)
    fail(Errc::io, "cannot stat '" + path + "': " + errno_text());
  return static_cast<uint64_t>(st.st_size);
}

}  // namespace compbin
