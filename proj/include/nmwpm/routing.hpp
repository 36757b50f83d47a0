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
#include <cstdint>
#include <vector>

#include "nmwpm/lattice.hpp"
#include "nmwpm/noise.hpp"

namespace nmwpm {

inline constexpr int kBoundary = -1;

// One matched pair of same-type defects, or a defect matched to the boundary
// (b == kBoundary, rotated code only). `route` selects among correction paths:
//  * toric pair: bit 0 reverses the x leg, bit 1 the y leg. Only meaningful
//    when that leg is exactly L/2 long, where both directions are minimal.
//  * rotated boundary match: 0 = nearest side (ties go to side 0), 1 = other side.
struct MatchedPair {
  int a = 0;
  int b = kBoundary;
  std::uint8_t route = 0;
  friend bool operator==(const MatchedPair&, const MatchedPair&) = default;
};

// Matched pairs per matching class (0: X-type stabilizers, 1: Z-type).
struct SyndromeMatching {
  std::array<std::vector<MatchedPair>, kNumClasses> classes;

  std::size_t num_pairs() const noexcept { return classes[0].size() + classes[1].size(); }
  // Sort pairs so (a < b, boundary last) and order by a; routes preserved.
  void canonicalize();
};

// Shortest correction paths between stabilizers of the same type.
// Toric paths go along x first, then y, using the signed wrap-minimal
// displacement in (-L/2, L/2]. Rotated paths come from a BFS over the
// qubit-adjacency graph of each stabilizer type, with two boundary nodes.
class PathRouter {
 public:
  explicit PathRouter(const CodeLattice& lattice);

  const CodeLattice& lattice() const noexcept { return *lattice_; }

  // Number of qubits on the shortest correction path.
  int distance(int a, int b) const;
  // Rotated only: path length from `a` to the given boundary side (0 or 1).
  int boundary_distance(int a, int side) const;
  int nearest_boundary_side(int a) const;
  int boundary_distance(int a) const { return boundary_distance(a, nearest_boundary_side(a)); }

  // Route bits that select an equally short alternative path.
  std::uint8_t tied_routes(const MatchedPair& pair) const;

  // Qubits flipped by the correction for one pair.
  std::vector<int> path(const MatchedPair& pair) const;
  int path_length(const MatchedPair& pair) const;

  // Logical overlap parity of the path (see logical_parity()).
  std::uint32_t path_parity(const MatchedPair& pair) const;

  PauliFrame correction(const SyndromeMatching& matching) const;

  // Error type corrected for a matching class.
  PauliType error_type(int cls) const { return cls == 0 ? PauliType::Z : PauliType::X; }

 private:
  struct TypeGraph {
    int first = 0;                 // first stabilizer index of this type
    int count = 0;                 // stabilizers of this type
    std::vector<int> dist;         // (count + 2) x (count + 2)
    std::vector<int> parent_node;  // BFS tree parent, rooted at each source
    std::vector<int> parent_qubit;
  };
  const TypeGraph& graph_for(int stabilizer) const;
  std::vector<int> bfs_path(const TypeGraph& g, int src_local, int dst_local) const;

  const CodeLattice* lattice_;
  std::array<TypeGraph, 2> graphs_;  // rotated only
  std::array<std::vector<std::uint32_t>, 2> qubit_logical_mask_;  // by error type
};

}  // namespace nmwpm
