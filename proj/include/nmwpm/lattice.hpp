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

#include <array>
#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace nmwpm {

enum class CodeKind : std::uint8_t { Toric = 0, RotatedSurface = 1 };
enum class PauliType : std::uint8_t { X = 0, Z = 1 };

std::string_view to_string(CodeKind kind);
CodeKind parse_code_kind(std::string_view text);

struct Coord {
  int x = 0;
  int y = 0;
  friend bool operator==(const Coord&, const Coord&) = default;
};

struct Stabilizer {
  int index = 0;
  PauliType pauli_type = PauliType::X;
  std::vector<int> support;  // sorted qubit indices
  Coord coord;
};

struct LogicalOperator {
  PauliType pauli_type = PauliType::X;
  std::vector<int> support;  // sorted qubit indices
};

// Matching classes. Defects of X-type stabilizers flag Z errors and vice versa.
inline constexpr int kNumClasses = 2;
inline int class_of(PauliType stabilizer_type) { return stabilizer_type == PauliType::X ? 0 : 1; }

// Stabilizer / qubit incidence for the toric and rotated surface codes.
//
// Coordinates:
//  * Toric: vertex (X) and plaquette (Z) stabilizers each sit on their own
//    L x L integer grid. Horizontal edge h(x, y) joins vertices (x, y) and
//    (x+1, y) and has index y*L + x; vertical edge v(x, y) joins (x, y) and
//    (x, y+1) and has index L*L + y*L + x. Plaquette (x, y) is the face whose
//    lower-left corner is vertex (x, y).
//  * Rotated: qubit (row i, col j) has index i*L + j and coordinate
//    (2j+1, 2i+1). Stabilizers sit on even coordinates in [0, 2L]. Z-type
//    weight-2 stabilizers line the left/right edges, X-type the top/bottom.
class CodeLattice {
 public:
  CodeKind kind() const noexcept { return kind_; }
  int distance() const noexcept { return distance_; }
  int num_qubits() const noexcept { return num_qubits_; }
  int num_stabilizers() const noexcept { return static_cast<int>(stabilizers_.size()); }
  int num_x_stabilizers() const noexcept { return num_x_; }

  const std::vector<Stabilizer>& stabilizers() const noexcept { return stabilizers_; }
  const Stabilizer& stabilizer(int index) const { return stabilizers_.at(static_cast<std::size_t>(index)); }
  const std::vector<LogicalOperator>& logical_ops() const noexcept { return logical_ops_; }

  // Logical operators of the given Pauli type, in construction order.
  std::vector<const LogicalOperator*> logicals_of(PauliType type) const;

  // Stabilizers of `type` whose support contains qubit q (1 or 2 entries).
  const std::vector<int>& stabilizers_on_qubit(int qubit, PauliType type) const {
    return type == PauliType::X ? qubit_x_stabs_[static_cast<std::size_t>(qubit)]
                                : qubit_z_stabs_[static_cast<std::size_t>(qubit)];
  }

  // Stabilizer index range [begin, end) holding one Pauli type.
  std::array<int, 2> type_range(PauliType type) const {
    return type == PauliType::X ? std::array<int, 2>{0, num_x_}
                                : std::array<int, 2>{num_x_, num_stabilizers()};
  }

  // Lattice center used for the radial feature, in the coordinate units above.
  std::array<double, 2> center() const noexcept { return center_; }

  // Qubit coordinates (rotated code only; empty for the toric code).
  const std::vector<Coord>& qubit_coords() const noexcept { return qubit_coords_; }

  friend CodeLattice build_toric(int distance);
  friend CodeLattice build_rotated(int distance);

 private:
  void finalize();

  CodeKind kind_ = CodeKind::Toric;
  int distance_ = 0;
  int num_qubits_ = 0;
  int num_x_ = 0;
  std::vector<Stabilizer> stabilizers_;
  std::vector<LogicalOperator> logical_ops_;
  std::vector<std::vector<int>> qubit_x_stabs_;
  std::vector<std::vector<int>> qubit_z_stabs_;
  std::vector<Coord> qubit_coords_;
  std::array<double, 2> center_{0.0, 0.0};
};

// Throws std::invalid_argument for distance < 2.
CodeLattice build_toric(int distance);

// Throws std::invalid_argument for even distances or distance < 3.
CodeLattice build_rotated(int distance);

CodeLattice build_lattice(CodeKind kind, int distance);

// True iff the two single-type Pauli operators commute: same type, or an
// even overlap between their supports.
bool commutes(PauliType type_a, const std::vector<int>& support_a, PauliType type_b,
              const std::vector<int>& support_b);

template <typename A, typename B>
bool commutes(const A& a, const B& b) {
  return commutes(a.pauli_type, a.support, b.pauli_type, b.support);
}

}  // namespace nmwpm
