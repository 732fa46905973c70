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

#ifndef COMPBIN_BYTE_IO_HPP
#define COMPBIN_BYTE_IO_HPP

#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace compbin {

/// Random-access read source. Implementations must be safe for concurrent
/// read_at calls from any number of threads.
class ByteSource {
 public:
  virtual ~ByteSource() = default;
  virtual uint64_t size() const = 0;
  /// Fills dst from [offset, offset + dst.size()). Throws Errc::io on
  /// failure or short read.
  virtual void read_at(uint64_t offset, std::span<std::byte> dst) const = 0;
  /// Base pointer when the whole source is addressable in memory, else null.
  virtual const std::byte* mapped() const { return nullptr; }
};

/// Sequential write sink.
class ByteSink {
 public:
  virtual ~ByteSink() = default;
  virtual void write(std::span<const std::byte> data) = 0;
  uint64_t bytes_written() const { return written_; }

 protected:
  uint64_t written_ = 0;
};

class MmapSource final : public ByteSource {
 public:
  explicit MmapSource(const std::string& path);
  ~MmapSource() override;
  MmapSource(const MmapSource&) = delete;
  MmapSource& operator=(const MmapSource&) = delete;

  uint64_t size() const override { return size_; }
  void read_at(uint64_t offset, std::span<std::byte> dst) const override;
  const std::byte* mapped() const override { return base_; }

 private:
  std::byte* base_ = nullptr;
  uint64_t size_ = 0;
};

class MemorySource final : public ByteSource {
 public:
  explicit MemorySource(std::vector<std::byte> data) : data_(std::move(data)) {}
  uint64_t size() const override { return data_.size(); }
  void read_at(uint64_t offset, std::span<std::byte> dst) const override;
  const std::byte* mapped() const override { return data_.data(); }
  std::vector<std::byte>& storage() { return data_; }

 private:
  std::vector<std::byte> data_;
};

class FileSink final : public ByteSink {
 public:
  explicit FileSink(const std::string& path);
  ~FileSink() override;
  FileSink(const FileSink&) = delete;
  FileSink& operator=(const FileSink&) = delete;

  void write(std::span<const std::byte> data) override;
  void close();

 private:
  std::string path_;
  int fd_ = -1;
};

class MemorySink final : public ByteSink {
 public:
  void write(std::span<const std::byte> data) override;
  std::vector<std::byte>& storage() { return data_; }
  std::vector<std::byte> take() { return std::move(data_); }

 private:
  std::vector<std::byte> data_;
};

uint64_t file_size_of(const std::string& path);

}  // namespace compbin

#endif  // COMPBIN_BYTE_IO_HPP
