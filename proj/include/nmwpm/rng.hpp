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
#include <limits>

namespace nmwpm {

// SplitMix64 (Steele, Lea & Flood 2014). Satisfies UniformRandomBitGenerator.
// Every experiment derives one generator per (seed, substream, index) so any
// shot can be replayed in isolation.
class SplitMix64 {
 public:
  using result_type = std::uint64_t;

  explicit SplitMix64(std::uint64_t seed = 0) noexcept : state_(seed) {}

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

  result_type operator()() noexcept {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  // Uniform double in [0, 1) from the top 53 bits.
  double uniform() noexcept { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

  // Standard normal via Box-Muller (one value per call).
  double normal() noexcept;

 private:
  std::uint64_t state_;
};

inline std::uint64_t mix64(std::uint64_t z) noexcept {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

// Named substreams hanging off the single experiment seed.
enum class Substream : std::uint64_t { Data = 1, Init = 2, Shots = 3, Holdout = 4 };

inline std::uint64_t derive_seed(std::uint64_t seed, Substream stream, std::uint64_t index) noexcept {
  return mix64(mix64(seed ^ (static_cast<std::uint64_t>(stream) * 0xD1B54A32D192ED03ULL)) + index);
}

}  // namespace nmwpm
