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
#include "nmwpm/routing.hpp"

namespace nmwpm {

inline constexpr int kPeDim = 16;
// x, y, tau one-hot (2), rho, PE.
inline constexpr int kNodeFeatureDim = 5 + kPeDim;

// One directed edge between two nodes of the same matching class.
struct GraphEdge {
  int src = 0;   // node row
  int dst = 0;   // node row
  int cls = 0;   // tau_edge
  int dist = 0;  // Manhattan distance, wrapped on the torus
  int dx = 0;    // signed displacement dst - src
  int dy = 0;
  int reverse = 0;  // index of the dst -> src edge
};

// Complete defect graph of one syndrome. Node rows 0..N-1 are the
// stabilizers; the rotated code appends one virtual boundary row per
// matching class (row N + cls). Features exist for every row, edges only
// between defects (and the class's virtual row) of one class.
struct DecodingGraph {
  CodeKind kind = CodeKind::Toric;
  NoiseKind noise = NoiseKind::Independent;
  int distance = 0;
  int num_stabilizers = 0;
  int num_nodes = 0;
  std::vector<int> defects;                        // stabilizer indices, ascending
  std::array<std::vector<int>, kNumClasses> class_nodes;  // defect rows, then the virtual row if present
  std::vector<GraphEdge> edges;                    // grouped by class, then by src
  std::vector<float> node_features;                // num_nodes x kNodeFeatureDim
  std::vector<std::int8_t> modulated;              // s_hat per node row, virtual rows +1

  bool has_virtual(int cls) const { return num_nodes > num_stabilizers && !class_nodes[static_cast<std::size_t>(cls)].empty(); }
  int virtual_node(int cls) const { return num_stabilizers + cls; }
  bool is_virtual(int node) const { return node >= num_stabilizers; }
  const float* features(int node) const { return node_features.data() + static_cast<std::ptrdiff_t>(node) * kNodeFeatureDim; }
};

DecodingGraph build_graph(const Syndrome& syndrome, const CodeLattice& lattice, NoiseKind noise);

// Radial feature. Toric: distance of the stabilizer coordinate to the
// lattice center. Rotated: norm of (mean supported-qubit coordinate - center).
double rho(const Stabilizer& stab, const CodeLattice& lattice);

// 2D sinusoidal encoding of the stabilizer position: per axis, sin and cos
// at 4 geometric frequencies. Toric plaquettes are offset by half a cell.
std::array<float, kPeDim> positional_encoding(int index, const CodeLattice& lattice);

// Size of the distance embedding table: max distance + 1.
int distance_table_size(CodeKind kind, int distance);

// Directed edge labels (1 = pair in the matching, both directions).
// Boundary matches label the defect <-> virtual edges.
std::vector<std::uint8_t> edge_labels(const DecodingGraph& graph, const SyndromeMatching& matching);

}  // namespace nmwpm
