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
#include <string_view>
#include <vector>

#include "nmwpm/lattice.hpp"

namespace nmwpm {

// Per-qubit X/Z error bits; a Y error sets both.
struct PauliFrame {
  std::vector<std::uint8_t> x_bits;
  std::vector<std::uint8_t> z_bits;

  PauliFrame() = default;
  explicit PauliFrame(int num_qubits)
      : x_bits(static_cast<std::size_t>(num_qubits), 0), z_bits(static_cast<std::size_t>(num_qubits), 0) {}

  int size() const noexcept { return static_cast<int>(x_bits.size()); }
  bool empty_weight() const noexcept;
  PauliFrame& operator^=(const PauliFrame& other);
  friend PauliFrame operator^(PauliFrame a, const PauliFrame& b) { return a ^= b; }
  friend bool operator==(const PauliFrame&, const PauliFrame&) = default;

  std::vector<std::uint8_t>& bits(PauliType error_type) { return error_type == PauliType::X ? x_bits : z_bits; }
  const std::vector<std::uint8_t>& bits(PauliType error_type) const {
    return error_type == PauliType::X ? x_bits : z_bits;
  }
};

// 1 = defect (stabilizer outcome -1).
struct Syndrome {
  std::vector<std::uint8_t> bits;

  int size() const noexcept { return static_cast<int>(bits.size()); }
  int count() const noexcept;
  bool any() const noexcept { return count() > 0; }
  Syndrome& operator^=(const Syndrome& other);
  friend bool operator==(const Syndrome&, const Syndrome&) = default;
};

enum class NoiseKind : std::uint8_t { Independent = 0, Depolarizing = 1 };

std::string_view to_string(NoiseKind kind);
NoiseKind parse_noise_kind(std::string_view text);

struct NoiseModel {
  NoiseKind kind = NoiseKind::Independent;
  double p = 0.0;
};

// Throws std::invalid_argument if p is outside [0, 1].
PauliFrame sample_error(const NoiseModel& model, const CodeLattice& lattice, std::uint64_t rng_seed);

Syndrome extract_syndrome(const PauliFrame& frame, const CodeLattice& lattice);

// Error type a stabilizer class detects: X-type stabilizers see Z errors.
inline PauliType detected_error(PauliType stabilizer_type) {
  return stabilizer_type == PauliType::X ? PauliType::Z : PauliType::X;
}

// Overlap parity of one error component with each logical operator of the
// conjugate type. Linear in the error; equals the homology class when the
// error has zero syndrome. Bit k corresponds to the k-th conjugate logical.
std::uint32_t logical_parity(const std::vector<std::uint8_t>& error_bits, PauliType error_type,
                             const CodeLattice& lattice);

// Throws std::invalid_argument if frame ^ correction has a nonzero syndrome.
bool is_logical_error(const PauliFrame& frame, const PauliFrame& correction, const CodeLattice& lattice);

}  // namespace nmwpm
