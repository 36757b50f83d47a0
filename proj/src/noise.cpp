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

#include "nmwpm/noise.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include "nmwpm/rng.hpp"

namespace nmwpm {

double SplitMix64::normal() noexcept {
  double u1 = uniform();
  while (u1 <= 0.0) u1 = uniform();
  const double u2 = uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

bool PauliFrame::empty_weight() const noexcept {
  for (std::size_t q = 0; q < x_bits.size(); ++q) {
    if (x_bits[q] || z_bits[q]) return false;
  }
  return true;
}

PauliFrame& PauliFrame::operator^=(const PauliFrame& other) {
  if (other.size() != size()) throw std::invalid_argument("pauli frame size mismatch");
  for (std::size_t q = 0; q < x_bits.size(); ++q) {
    x_bits[q] ^= other.x_bits[q];
    z_bits[q] ^= other.z_bits[q];
  }
  return *this;
}

int Syndrome::count() const noexcept {
  int n = 0;
  for (auto b : bits) n += b;
  return n;
}

Syndrome& Syndrome::operator^=(const Syndrome& other) {
  if (other.size() != size()) throw std::invalid_argument("syndrome size mismatch");
  for (std::size_t i = 0; i < bits.size(); ++i) bits[i] ^= other.bits[i];
  return *this;
}

std::string_view to_string(NoiseKind kind) {
  return kind == NoiseKind::Independent ? "independent" : "depolarizing";
}

NoiseKind parse_noise_kind(std::string_view text) {
  if (text == "independent") return NoiseKind::Independent;
  if (text == "depolarizing") return NoiseKind::Depolarizing;
  throw std::invalid_argument("unknown noise kind: " + std::string(text));
}

PauliFrame sample_error(const NoiseModel& model, const CodeLattice& lattice, std::uint64_t rng_seed) {
  if (!(model.p >= 0.0 && model.p <= 1.0)) throw std::invalid_argument("physical error rate must lie in [0, 1]");
  PauliFrame frame(lattice.num_qubits());
  if (model.p == 0.0) return frame;
  SplitMix64 rng(rng_seed);
  const int n = lattice.num_qubits();
  if (model.kind == NoiseKind::Independent) {
    for (int q = 0; q < n; ++q) {
      frame.x_bits[static_cast<std::size_t>(q)] = rng.uniform() < model.p;
      frame.z_bits[static_cast<std::size_t>(q)] = rng.uniform() < model.p;
    }
  } else {
    const double third = model.p / 3.0;
    for (int q = 0; q < n; ++q) {
      const double u = rng.uniform();
      if (u < third) {
        frame.x_bits[static_cast<std::size_t>(q)] = 1;
      } else if (u < 2.0 * third) {
        frame.x_bits[static_cast<std::size_t>(q)] = 1;  // Y
        frame.z_bits[static_cast<std::size_t>(q)] = 1;
      } else if (u < model.p) {
        frame.z_bits[static_cast<std::size_t>(q)] = 1;
      }
    }
  }
  return frame;
}

Syndrome extract_syndrome(const PauliFrame& frame, const CodeLattice& lattice) {
  if (frame.size() != lattice.num_qubits()) throw std::invalid_argument("frame does not match lattice");
  Syndrome s;
  s.bits.assign(static_cast<std::size_t>(lattice.num_stabilizers()), 0);
  for (const auto& stab : lattice.stabilizers()) {
    const auto& seen = frame.bits(detected_error(stab.pauli_type));
    std::uint8_t parity = 0;
    for (int q : stab.support) parity ^= seen[static_cast<std::size_t>(q)];
    s.bits[static_cast<std::size_t>(stab.index)] = parity;
  }
  return s;
}

std::uint32_t logical_parity(const std::vector<std::uint8_t>& error_bits, PauliType error_type,
                             const CodeLattice& lattice) {
  const PauliType conjugate = error_type == PauliType::X ? PauliType::Z : PauliType::X;
  std::uint32_t out = 0;
  int k = 0;
  for (const auto* op : lattice.logicals_of(conjugate)) {
    std::uint8_t parity = 0;
    for (int q : op->support) parity ^= error_bits[static_cast<std::size_t>(q)];
    out |= static_cast<std::uint32_t>(parity) << k;
    ++k;
  }
  return out;
}

bool is_logical_error(const PauliFrame& frame, const PauliFrame& correction, const CodeLattice& lattice) {
  const PauliFrame residual = frame ^ correction;
  if (extract_syndrome(residual, lattice).any()) {
    throw std::invalid_argument("residual error has a nonzero syndrome; correction is invalid");
  }
  return logical_parity(residual.x_bits, PauliType::X, lattice) != 0 ||
         logical_parity(residual.z_bits, PauliType::Z, lattice) != 0;
}

}  // namespace nmwpm
