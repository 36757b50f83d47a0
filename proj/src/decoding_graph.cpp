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

#include "nmwpm/decoding_graph.hpp"

#include <cmath>
#include <stdexcept>
#include <unordered_map>

namespace nmwpm {

namespace {

// Signed wrap-minimal displacement in (-L/2, L/2].
int wrap(int d, int L) {
  d %= L;
  if (d < 0) d += L;
  if (2 * d > L) d -= L;
  return d;
}

}  // namespace

int distance_table_size(CodeKind kind, int distance) {
  return kind == CodeKind::Toric ? distance + 1 : 4 * distance + 1;
}

double rho(const Stabilizer& stab, const CodeLattice& lattice) {
  const auto c = lattice.center();
  if (lattice.kind() == CodeKind::Toric) {
    return std::hypot(stab.coord.x - c[0], stab.coord.y - c[1]);
  }
  double mx = 0.0, my = 0.0;
  for (int q : stab.support) {
    mx += lattice.qubit_coords()[static_cast<std::size_t>(q)].x;
    my += lattice.qubit_coords()[static_cast<std::size_t>(q)].y;
  }
  mx /= static_cast<double>(stab.support.size());
  my /= static_cast<double>(stab.support.size());
  return std::hypot(mx - c[0], my - c[1]);
}

std::array<float, kPeDim> positional_encoding(int index, const CodeLattice& lattice) {
  const auto& s = lattice.stabilizer(index);
  double x = s.coord.x, y = s.coord.y;
  if (lattice.kind() == CodeKind::Toric && s.pauli_type == PauliType::Z) {
    x += 0.5;
    y += 0.5;
  }
  std::array<float, kPeDim> pe{};
  constexpr int kFreq = kPeDim / 4;
  for (int k = 0; k < kFreq; ++k) {
    const double w = std::pow(10.0, -k);
    pe[static_cast<std::size_t>(2 * k)] = static_cast<float>(std::sin(x * w));
    pe[static_cast<std::size_t>(2 * k + 1)] = static_cast<float>(std::cos(x * w));
    pe[static_cast<std::size_t>(2 * kFreq + 2 * k)] = static_cast<float>(std::sin(y * w));
    pe[static_cast<std::size_t>(2 * kFreq + 2 * k + 1)] = static_cast<float>(std::cos(y * w));
  }
  return pe;
}

DecodingGraph build_graph(const Syndrome& syndrome, const CodeLattice& lattice, NoiseKind noise) {
  const int N = lattice.num_stabilizers();
  if (syndrome.size() != N) throw std::invalid_argument("syndrome length does not match the lattice");
  const bool rotated = lattice.kind() == CodeKind::RotatedSurface;
  const int L = lattice.distance();

  DecodingGraph g;
  g.kind = lattice.kind();
  g.noise = noise;
  g.distance = L;
  g.num_stabilizers = N;
  g.num_nodes = N + (rotated ? kNumClasses : 0);
  g.node_features.assign(static_cast<std::size_t>(g.num_nodes) * kNodeFeatureDim, 0.0f);
  g.modulated.assign(static_cast<std::size_t>(g.num_nodes), 1);

  for (int i = 0; i < N; ++i) {
    const auto& s = lattice.stabilizer(i);
    const bool active = syndrome.bits[static_cast<std::size_t>(i)] != 0;
    float* f = g.node_features.data() + static_cast<std::ptrdiff_t>(i) * kNodeFeatureDim;
    if (active) {
      g.defects.push_back(i);
      g.class_nodes[static_cast<std::size_t>(class_of(s.pauli_type))].push_back(i);
      f[0] = static_cast<float>(s.coord.x);
      f[1] = static_cast<float>(s.coord.y);
      f[2] = s.pauli_type == PauliType::X ? 1.0f : 0.0f;
      f[3] = s.pauli_type == PauliType::Z ? 1.0f : 0.0f;
      f[4] = static_cast<float>(rho(s, lattice));
    }
    const auto pe = positional_encoding(i, lattice);
    std::copy(pe.begin(), pe.end(), f + 5);
    g.modulated[static_cast<std::size_t>(i)] = active ? 1 : -1;
  }

  for (int cls = 0; cls < kNumClasses; ++cls) {
    auto& nodes = g.class_nodes[static_cast<std::size_t>(cls)];
    if (rotated && !nodes.empty()) nodes.push_back(N + cls);
    const std::size_t first = g.edges.size();
    const int n = static_cast<int>(nodes.size());
    for (int a = 0; a < n; ++a) {
      for (int b = 0; b < n; ++b) {
        if (a == b) continue;
        GraphEdge e;
        e.src = nodes[static_cast<std::size_t>(a)];
        e.dst = nodes[static_cast<std::size_t>(b)];
        e.cls = cls;
        const bool src_virtual = e.src >= N, dst_virtual = e.dst >= N;
        if (!src_virtual && !dst_virtual) {
          const auto ps = lattice.stabilizer(e.src).coord, pd = lattice.stabilizer(e.dst).coord;
          e.dx = pd.x - ps.x;
          e.dy = pd.y - ps.y;
          if (!rotated) {
            e.dx = wrap(e.dx, L);
            e.dy = wrap(e.dy, L);
          }
        } else {
          // Straight run to the nearer boundary that terminates this class's
          // error strings: left/right for class 0, top/bottom for class 1.
          const auto p = lattice.stabilizer(src_virtual ? e.dst : e.src).coord;
          const int u = cls == 0 ? p.x : p.y;
          const int to_boundary = (u <= 2 * L - u) ? -u : 2 * L - u;
          const int step = src_virtual ? -to_boundary : to_boundary;
          (cls == 0 ? e.dx : e.dy) = step;
        }
        e.dist = std::abs(e.dx) + std::abs(e.dy);
        // Reverse edge of (a, b) is (b, a); row-major over a with the
        // diagonal skipped.
        e.reverse = static_cast<int>(first) + b * (n - 1) + (a < b ? a : a - 1);
        g.edges.push_back(e);
      }
    }
  }
  return g;
}

std::vector<std::uint8_t> edge_labels(const DecodingGraph& graph, const SyndromeMatching& matching) {
  std::unordered_map<long long, std::size_t> index;
  index.reserve(graph.edges.size());
  auto key = [&](int s, int d) { return static_cast<long long>(s) * graph.num_nodes + d; };
  for (std::size_t i = 0; i < graph.edges.size(); ++i) index[key(graph.edges[i].src, graph.edges[i].dst)] = i;
  std::vector<std::uint8_t> y(graph.edges.size(), 0);
  for (int cls = 0; cls < kNumClasses; ++cls) {
    for (const auto& p : matching.classes[static_cast<std::size_t>(cls)]) {
      const int b = p.b == kBoundary ? graph.virtual_node(cls) : p.b;
      if (p.b == kBoundary && !graph.has_virtual(cls)) throw std::invalid_argument("boundary match on a graph without virtual nodes");
      const auto f = index.find(key(p.a, b));
      const auto r = index.find(key(b, p.a));
      if (f == index.end() || r == index.end()) throw std::invalid_argument("matched pair is not an edge of the graph");
      y[f->second] = 1;
      y[r->second] = 1;
    }
  }
  return y;
}

}  // namespace nmwpm
