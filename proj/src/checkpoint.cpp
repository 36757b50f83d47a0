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

#include "nmwpm/checkpoint.hpp"

#include <sstream>
#include <stdexcept>

#include "nmwpm/io.hpp"

namespace nmwpm {

const CheckpointEntry* Checkpoint::find(const std::string& name) const {
  for (const auto& e : entries) {
    if (e.name == name) return &e;
  }
  return nullptr;
}

std::vector<char> serialize_checkpoint(const Checkpoint& ckpt) {
  ByteWriter w;
  w.put_bytes(std::string_view(kCheckpointMagic, 8));
  w.put<std::uint32_t>(kCheckpointVersion);
  std::string meta;
  for (const auto& [k, v] : ckpt.meta) {
    if (k.find_first_of("=\n") != std::string::npos || v.find('\n') != std::string::npos) {
      throw std::invalid_argument("metadata keys and values must be single-line (key without '=')");
    }
    meta += k + "=" + v + "\n";
  }
  w.put<std::uint32_t>(static_cast<std::uint32_t>(meta.size()));
  w.put_bytes(meta);
  w.put<std::uint32_t>(static_cast<std::uint32_t>(ckpt.entries.size()));
  for (const auto& e : ckpt.entries) {
    std::uint64_t count = 1;
    for (auto d : e.shape) count *= d;
    if (count != e.data.size()) throw std::invalid_argument("checkpoint entry " + e.name + " has a shape/data mismatch");
    w.put<std::uint32_t>(static_cast<std::uint32_t>(e.name.size()));
    w.put_bytes(e.name);
    w.put<std::uint32_t>(static_cast<std::uint32_t>(e.shape.size()));
    for (auto d : e.shape) w.put<std::uint64_t>(d);
  }
  for (const auto& e : ckpt.entries) {
    for (float v : e.data) w.put<float>(v);
  }
  return w.bytes();
}

Checkpoint parse_checkpoint(std::vector<char> bytes) {
  ByteReader r(std::move(bytes));
  if (r.get_bytes(8) != std::string_view(kCheckpointMagic, 8)) throw std::runtime_error("not a checkpoint file");
  const auto version = r.get<std::uint32_t>();
  if (version != kCheckpointVersion) throw std::runtime_error("unsupported checkpoint version " + std::to_string(version));
  Checkpoint ckpt;
  std::istringstream meta(r.get_bytes(r.get<std::uint32_t>()));
  for (std::string line; std::getline(meta, line);) {
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw std::runtime_error("malformed checkpoint metadata line");
    ckpt.meta[line.substr(0, eq)] = line.substr(eq + 1);
  }
  const auto n = r.get<std::uint32_t>();
  ckpt.entries.resize(n);
  for (auto& e : ckpt.entries) {
    e.name = r.get_bytes(r.get<std::uint32_t>());
    const auto rank = r.get<std::uint32_t>();
    for (std::uint32_t i = 0; i < rank; ++i) e.shape.push_back(r.get<std::uint64_t>());
  }
  for (auto& e : ckpt.entries) {
    std::uint64_t count = 1;
    for (auto d : e.shape) count *= d;
    e.data.resize(count);
    for (auto& v : e.data) v = r.get<float>();
  }
  if (!r.at_end()) throw std::runtime_error("trailing bytes after checkpoint payload");
  return ckpt;
}

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& ckpt) {
  atomic_write(path, serialize_checkpoint(ckpt));
}

Checkpoint load_checkpoint(const std::filesystem::path& path) { return parse_checkpoint(read_file(path)); }

}  // namespace nmwpm
