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

#include "nmwpm/decoder.hpp"

#include <stdexcept>

#include "nmwpm/blossom.hpp"

namespace nmwpm {

std::vector<MatchedPair> match_class(const std::vector<int>& defects, const std::function<double(int, int)>& pair,
                                     const std::function<double(int)>& boundary) {
  const int k = static_cast<int>(defects.size());
  std::vector<MatchedPair> out;
  if (k == 0) return out;
  const bool copies = static_cast<bool>(boundary);
  if (!copies && k % 2 != 0) throw std::logic_error("odd defect count in a class without boundary nodes");
  MatchGraph g(copies ? 2 * k : k, MatchGraph::kAbsent);
  for (int i = 0; i < k; ++i) {
    for (int j = i + 1; j < k; ++j) {
      g.set_weight(i, j, pair(i, j));
      if (copies) g.set_weight(k + i, k + j, 0.0);
    }
    if (copies) g.set_weight(i, k + i, boundary(i));
  }
  for (auto [u, v] : mwpm(g).pairs) {
    if (u >= k) continue;  // copy-copy
    MatchedPair p;
    p.a = defects[static_cast<std::size_t>(u)];
    p.b = v >= k ? kBoundary : defects[static_cast<std::size_t>(v)];
    out.push_back(p);
  }
  return out;
}

SyndromeMatching decode_with_probabilities(const DecodingGraph& graph, const std::vector<double>& probabilities) {
  const auto w = edge_weights(graph, probabilities);
  SyndromeMatching m;
  int first = 0;
  for (int cls = 0; cls < kNumClasses; ++cls) {
    const auto& nodes = graph.class_nodes[static_cast<std::size_t>(cls)];
    const int n = static_cast<int>(nodes.size());
    auto edge = [&](int a, int b) { return static_cast<std::size_t>(first + a * (n - 1) + (b < a ? b : b - 1)); };
    const bool virt = graph.has_virtual(cls);
    const std::vector<int> defects(nodes.begin(), nodes.end() - (virt ? 1 : 0));
    std::function<double(int)> boundary;
    if (virt) boundary = [&](int i) { return w[edge(i, n - 1)]; };
    m.classes[static_cast<std::size_t>(cls)] = match_class(defects, [&](int i, int j) { return w[edge(i, j)]; }, boundary);
    first += n * (n - 1);
  }
  m.canonicalize();
  return m;
}

SyndromeMatching decode(const Syndrome& syndrome, const CodeLattice& lattice, const QwpParams& params, NoiseKind noise) {
  const auto graph = build_graph(syndrome, lattice, noise);
  if (graph.edges.empty()) return {};
  return decode_with_probabilities(graph, predict_edges(graph, params));
}

SyndromeMatching MwpmDecoder::decode(const Syndrome& syndrome) const {
  const auto& lat = router_.lattice();
  if (syndrome.size() != lat.num_stabilizers()) throw std::invalid_argument("syndrome length does not match the lattice");
  const bool rotated = lat.kind() == CodeKind::RotatedSurface;
  SyndromeMatching m;
  for (PauliType t : {PauliType::X, PauliType::Z}) {
    const int cls = class_of(t);
    std::vector<int> defects;
    const auto range = lat.type_range(t);
    for (int i = range[0]; i < range[1]; ++i) {
      if (syndrome.bits[static_cast<std::size_t>(i)]) defects.push_back(i);
    }
    auto pair = [&](int i, int j) {
      return static_cast<double>(router_.distance(defects[static_cast<std::size_t>(i)], defects[static_cast<std::size_t>(j)]));
    };
    std::function<double(int)> boundary;
    if (rotated) boundary = [&](int i) { return static_cast<double>(router_.boundary_distance(defects[static_cast<std::size_t>(i)])); };
    m.classes[static_cast<std::size_t>(cls)] = match_class(defects, pair, boundary);
  }
  m.canonicalize();
  return m;
}

}  // namespace nmwpm
