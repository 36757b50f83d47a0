// Copyright 2026 The NMWPM Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <bit>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace nmwpm {

static_assert(std::endian::native == std::endian::little, "binary formats assume a little-endian host");

// Append-only little-endian byte buffer.
class ByteWriter {
 public:
  template <typename T>
  void put(T v) {
    const auto* p = reinterpret_cast<const char*>(&v);
    buf_.insert(buf_.end(), p, p + sizeof(T));
  }
  void put_bytes(std::string_view s) { buf_.insert(buf_.end(), s.begin(), s.end()); }
  const std::vector<char>& bytes() const noexcept { return buf_; }

 private:
  std::vector<char> buf_;
};

// Bounds-checked reader; throws std::runtime_error on truncation.
class ByteReader {
 public:
  explicit ByteReader(std::vector<char> data) : buf_(std::move(data)) {}
  template <typename T>
  T get() {
    need(sizeof(T));
    T v;
    std::memcpy(&v, buf_.data() + pos_, sizeof(T));
    pos_ += sizeof(T);
    return v;
  }
  std::string get_bytes(std::size_t n) {
    need(n);
    std::string s(buf_.data() + pos_, n);
    pos_ += n;
    return s;
  }
  bool at_end() const noexcept { return pos_ == buf_.size(); }

 private:
  void need(std::size_t n) const;
  std::vector<char> buf_;
  std::size_t pos_ = 0;
};

std::vector<char> read_file(const std::filesystem::path& path);

// Writes to a sibling temporary file, then renames over `path`.
void atomic_write(const std::filesystem::path& path, const std::vector<char>& bytes);
void atomic_write(const std::filesystem::path& path, std::string_view text);

}  // namespace nmwpm
