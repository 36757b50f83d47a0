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

#include "nmwpm/routing.hpp"

#include <algorithm>
#include <deque>
#include <stdexcept>

namespace nmwpm {

namespace {

// Signed displacement from a to b on a cycle of length L, in (-L/2, L/2].
int wrap_delta(int a, int b, int L) {
  int d = ((b - a) % L + L) % L;
  if (2 * d > L) d -= L;
  return d;
}

}  // namespace

void SyndromeMatching::canonicalize() {
  for (auto& pairs : classes) {
    for (auto& p : pairs) {
      if (p.b != kBoundary && p.b < p.a) std::swap(p.a, p.b);
    }
    std::sort(pairs.begin(), pairs.end(), [](const MatchedPair& l, const MatchedPair& r) {
      if (l.a != r.a) return l.a < r.a;
      return static_cast<unsigned>(l.b) < static_cast<unsigned>(r.b);
    });
  }
}

PathRouter::PathRouter(const CodeLattice& lattice) : lattice_(&lattice) {
  for (int t = 0; t < 2; ++t) {
    const PauliType error_type = t == 0 ? PauliType::X : PauliType::Z;
    auto& mask = qubit_logical_mask_[static_cast<std::size_t>(t)];
    mask.assign(static_cast<std::size_t>(lattice.num_qubits()), 0);
    const PauliType conjugate = error_type == PauliType::X ? PauliType::Z : PauliType::X;
    int k = 0;
    for (const auto* op : lattice.logicals_of(conjugate)) {
      for (int q : op->support) mask[static_cast<std::size_t>(q)] |= 1u << k;
      ++k;
    }
  }
  if (lattice.kind() != CodeKind::RotatedSurface) return;

  const int L = lattice.distance();
  for (int cls = 0; cls < 2; ++cls) {
    const PauliType type = cls == 0 ? PauliType::X : PauliType::Z;
    auto& g = graphs_[static_cast<std::size_t>(cls)];
    const auto range = lattice.type_range(type);
    g.first = range[0];
    g.count = range[1] - range[0];
    const int n = g.count + 2;
    // adjacency: (neighbor node, qubit), sorted by qubit for deterministic BFS
    std::vector<std::vector<std::pair<int, int>>> adj(static_cast<std::size_t>(n));
    for (int q = 0; q < lattice.num_qubits(); ++q) {
      const auto& stabs = lattice.stabilizers_on_qubit(q, type);
      if (stabs.size() == 2) {
        const int u = stabs[0] - g.first, v = stabs[1] - g.first;
        adj[static_cast<std::size_t>(u)].push_back({v, q});
        adj[static_cast<std::size_t>(v)].push_back({u, q});
      } else if (stabs.size() == 1) {
        const int row = q / L, col = q % L;
        // X-type checks end on the left/right edges, Z-type on top/bottom.
        const int side = type == PauliType::X ? (col == 0 ? 0 : 1) : (row == 0 ? 0 : 1);
        const int u = stabs[0] - g.first, b = g.count + side;
        adj[static_cast<std::size_t>(u)].push_back({b, q});
        adj[static_cast<std::size_t>(b)].push_back({u, q});
      }
    }
    g.dist.assign(static_cast<std::size_t>(n * n), -1);
    g.parent_node.assign(static_cast<std::size_t>(n * n), -1);
    g.parent_qubit.assign(static_cast<std::size_t>(n * n), -1);
    for (int src = 0; src < n; ++src) {
      const std::size_t base = static_cast<std::size_t>(src * n);
      std::deque<int> queue{src};
      g.dist[base + static_cast<std::size_t>(src)] = 0;
      while (!queue.empty()) {
        const int u = queue.front();
        queue.pop_front();
        // Boundary nodes terminate paths; never route through them.
        if (u >= g.count && u != src) continue;
        for (auto [v, q] : adj[static_cast<std::size_t>(u)]) {
          if (g.dist[base + static_cast<std::size_t>(v)] >= 0) continue;
          g.dist[base + static_cast<std::size_t>(v)] = g.dist[base + static_cast<std::size_t>(u)] + 1;
          g.parent_node[base + static_cast<std::size_t>(v)] = u;
          g.parent_qubit[base + static_cast<std::size_t>(v)] = q;
          queue.push_back(v);
        }
      }
    }
  }
}

const PathRouter::TypeGraph& PathRouter::graph_for(int stabilizer) const {
  return graphs_[static_cast<std::size_t>(class_of(lattice_->stabilizer(stabilizer).pauli_type))];
}

std::vector<int> PathRouter::bfs_path(const TypeGraph& g, int src_local, int dst_local) const {
  const int n = g.count + 2;
  const std::size_t base = static_cast<std::size_t>(src_local * n);
  if (g.dist[base + static_cast<std::size_t>(dst_local)] < 0) throw std::logic_error("unreachable stabilizer");
  std::vector<int> qubits;
  for (int v = dst_local; v != src_local; v = g.parent_node[base + static_cast<std::size_t>(v)]) {
    qubits.push_back(g.parent_qubit[base + static_cast<std::size_t>(v)]);
  }
  std::reverse(qubits.begin(), qubits.end());
  return qubits;
}

int PathRouter::distance(int a, int b) const {
  const auto& sa = lattice_->stabilizer(a);
  const auto& sb = lattice_->stabilizer(b);
  if (sa.pauli_type != sb.pauli_type) throw std::invalid_argument("distance between stabilizers of different type");
  if (lattice_->kind() == CodeKind::Toric) {
    const int L = lattice_->distance();
    return std::abs(wrap_delta(sa.coord.x, sb.coord.x, L)) + std::abs(wrap_delta(sa.coord.y, sb.coord.y, L));
  }
  const auto& g = graph_for(a);
  return g.dist[static_cast<std::size_t>((a - g.first) * (g.count + 2) + (b - g.first))];
}

int PathRouter::boundary_distance(int a, int side) const {
  if (lattice_->kind() != CodeKind::RotatedSurface) throw std::logic_error("toric code has no boundary");
  const auto& g = graph_for(a);
  return g.dist[static_cast<std::size_t>((a - g.first) * (g.count + 2) + g.count + side)];
}

int PathRouter::nearest_boundary_side(int a) const {
  return boundary_distance(a, 1) < boundary_distance(a, 0) ? 1 : 0;
}

std::uint8_t PathRouter::tied_routes(const MatchedPair& pair) const {
  if (pair.b == kBoundary) {
    return boundary_distance(pair.a, 0) == boundary_distance(pair.a, 1) ? 1 : 0;
  }
  if (lattice_->kind() != CodeKind::Toric) return 0;
  const int L = lattice_->distance();
  if (L % 2 != 0) return 0;
  const auto& sa = lattice_->stabilizer(pair.a);
  const auto& sb = lattice_->stabilizer(pair.b);
  std::uint8_t out = 0;
  if (2 * std::abs(wrap_delta(sa.coord.x, sb.coord.x, L)) == L) out |= 1;
  if (2 * std::abs(wrap_delta(sa.coord.y, sb.coord.y, L)) == L) out |= 2;
  return out;
}

std::vector<int> PathRouter::path(const MatchedPair& pair) const {
  const auto& sa = lattice_->stabilizer(pair.a);
  if (pair.b == kBoundary) {
    const auto& g = graph_for(pair.a);
    const int nearest = nearest_boundary_side(pair.a);
    const int side = pair.route & 1 ? 1 - nearest : nearest;
    return bfs_path(g, pair.a - g.first, g.count + side);
  }
  const auto& sb = lattice_->stabilizer(pair.b);
  if (sa.pauli_type != sb.pauli_type) throw std::invalid_argument("pair of stabilizers with different type");
  if (lattice_->kind() == CodeKind::RotatedSurface) {
    const auto& g = graph_for(pair.a);
    return bfs_path(g, pair.a - g.first, pair.b - g.first);
  }

  const int L = lattice_->distance();
  auto wrap = [L](int v) { return ((v % L) + L) % L; };
  auto h = [&](int x, int y) { return wrap(y) * L + wrap(x); };
  auto v = [&](int x, int y) { return L * L + wrap(y) * L + wrap(x); };
  int dx = wrap_delta(sa.coord.x, sb.coord.x, L);
  int dy = wrap_delta(sa.coord.y, sb.coord.y, L);
  if ((pair.route & 1) && 2 * std::abs(dx) == L) dx = -dx;
  if ((pair.route & 2) && 2 * std::abs(dy) == L) dy = -dy;
  const bool vertex = sa.pauli_type == PauliType::X;
  std::vector<int> qubits;
  qubits.reserve(static_cast<std::size_t>(std::abs(dx) + std::abs(dy)));
  int x = sa.coord.x, y = sa.coord.y;
  const int sx = dx > 0 ? 1 : -1, sy = dy > 0 ? 1 : -1;
  for (int i = 0; i < std::abs(dx); ++i) {
    if (vertex) {
      qubits.push_back(sx > 0 ? h(x, y) : h(x - 1, y));
    } else {
      qubits.push_back(sx > 0 ? v(x + 1, y) : v(x, y));
    }
    x += sx;
  }
  for (int i = 0; i < std::abs(dy); ++i) {
    if (vertex) {
      qubits.push_back(sy > 0 ? v(x, y) : v(x, y - 1));
    } else {
      qubits.push_back(sy > 0 ? h(x, y + 1) : h(x, y));
    }
    y += sy;
  }
  return qubits;
}

int PathRouter::path_length(const MatchedPair& pair) const {
  if (pair.b == kBoundary) {
    const int nearest = nearest_boundary_side(pair.a);
    return boundary_distance(pair.a, pair.route & 1 ? 1 - nearest : nearest);
  }
  return distance(pair.a, pair.b);
}

std::uint32_t PathRouter::path_parity(const MatchedPair& pair) const {
  const int cls = class_of(lattice_->stabilizer(pair.a).pauli_type);
  const auto& mask = qubit_logical_mask_[error_type(cls) == PauliType::X ? 0 : 1];
  std::uint32_t out = 0;
  for (int q : path(pair)) out ^= mask[static_cast<std::size_t>(q)];
  return out;
}

PauliFrame PathRouter::correction(const SyndromeMatching& matching) const {
  PauliFrame frame(lattice_->num_qubits());
  for (int cls = 0; cls < kNumClasses; ++cls) {
    auto& bits = frame.bits(error_type(cls));
    for (const auto& pair : matching.classes[static_cast<std::size_t>(cls)]) {
      for (int q : path(pair)) bits[static_cast<std::size_t>(q)] ^= 1;
    }
  }
  return frame;
}

}  // namespace nmwpm
