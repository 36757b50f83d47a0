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

#include <filesystem>
#include <map>
#include <string>
#include <vector>

namespace nmwpm {

// Named float32 arrays plus free-form key=value metadata.
//
// Layout (little-endian):
//   8 bytes  magic "NMWPMCKP"
//   u32      version (1)
//   u32      metadata length, then that many bytes of "key=value\n" lines
//   u32      entry count
//   per entry: u32 name length, name bytes, u32 rank, rank x u64 dims
//   per entry, in the same order: row-major f32 payload
struct CheckpointEntry {
  std::string name;
  std::vector<std::uint64_t> shape;
  std::vector<float> data;
};

struct Checkpoint {
  std::map<std::string, std::string> meta;
  std::vector<CheckpointEntry> entries;

  const CheckpointEntry* find(const std::string& name) const;
};

inline constexpr char kCheckpointMagic[9] = "NMWPMCKP";
inline constexpr std::uint32_t kCheckpointVersion = 1;

std::vector<char> serialize_checkpoint(const Checkpoint& ckpt);
Checkpoint parse_checkpoint(std::vector<char> bytes);

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& ckpt);
Checkpoint load_checkpoint(const std::filesystem::path& path);

}  // namespace nmwpm
