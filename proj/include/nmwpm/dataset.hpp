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

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "nmwpm/ground_truth.hpp"
#include "nmwpm/noise.hpp"
#include "nmwpm/routing.hpp"

namespace nmwpm {

// One labeled shot: the syndrome and its ground-truth matching.
struct DatasetRecord {
  std::uint64_t index = 0;  // shot index in the Data substream
  double p = 0.0;
  Syndrome syndrome;
  SyndromeMatching matching;
};

// Layout (little-endian):
//   8 bytes  magic "NMWPMDS" + version byte (1)
//   u32 code, u32 L, u32 noise, u64 record count, u64 timeouts, u64 infeasible
//   per record: u64 index, f64 p, u32 N, ceil(N/8) bytes of packed syndrome
//     bits (LSB first), then per class: u32 pair count, pairs as
//     (u32 a, u32 b, u8 route) with b = 0xFFFFFFFF for the boundary
struct Dataset {
  CodeKind code = CodeKind::Toric;
  int distance = 0;
  NoiseKind noise = NoiseKind::Independent;
  long timeouts = 0;
  long infeasible = 0;
  std::vector<DatasetRecord> records;
};

inline constexpr char kDatasetMagic[8] = {'N', 'M', 'W', 'P', 'M', 'D', 'S', 1};

// Labels `shots` shots sampled exactly as the trainer samples them; shots
// that time out or have no valid label are counted and left out.
Dataset generate_dataset(const PathRouter& router, NoiseKind noise, double p_lo, double p_hi, long shots,
                         std::uint64_t seed, const GroundTruthOptions& gt = {}, int threads = 1);

std::vector<char> serialize_dataset(const Dataset& ds);
Dataset parse_dataset(std::vector<char> bytes);
void save_dataset(const std::filesystem::path& path, const Dataset& ds);
Dataset load_dataset(const std::filesystem::path& path);

// Text syndromes: one per line, either a string of 0/1 of length N or the
// word "defects" followed by stabilizer indices. Blank lines and lines
// starting with '#' are skipped.
std::vector<Syndrome> parse_syndromes(const std::string& text, int num_stabilizers);

}  // namespace nmwpm
