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

#include <limits>
#include <optional>
#include <utility>
#include <vector>

namespace nmwpm {

// Dense symmetric weight matrix on n vertices. An infinite weight marks an
// absent edge.
class MatchGraph {
 public:
  static constexpr double kAbsent = std::numeric_limits<double>::infinity();

  MatchGraph() = default;
  explicit MatchGraph(int n_vertices, double fill = 0.0)
      : n_(n_vertices), w_(static_cast<std::size_t>(n_vertices) * static_cast<std::size_t>(n_vertices), fill) {}

  int size() const noexcept { return n_; }
  double weight(int u, int v) const { return w_[index(u, v)]; }
  void set_weight(int u, int v, double w) {
    w_[index(u, v)] = w;
    w_[index(v, u)] = w;
  }

 private:
  std::size_t index(int u, int v) const {
    return static_cast<std::size_t>(u) * static_cast<std::size_t>(n_) + static_cast<std::size_t>(v);
  }
  int n_ = 0;
  std::vector<double> w_;
};

// Vertex-disjoint pairs, each stored as (smaller, larger), sorted.
struct Matching {
  std::vector<std::pair<int, int>> pairs;

  void canonicalize();
  // Sum of pair weights, accumulated in canonical pair order.
  double total_weight(const MatchGraph& graph) const;
  bool is_perfect(int n_vertices) const;
  friend bool operator==(const Matching&, const Matching&) = default;
};

// Minimum-weight perfect matching by Edmonds' blossom algorithm (primal-dual,
// O(n^3)). Throws std::invalid_argument on odd n or NaN weights and
// std::runtime_error if no perfect matching exists over the present edges.
Matching mwpm(const MatchGraph& graph);

// As mwpm(), but returns nullopt when the present edges admit no perfect matching.
std::optional<Matching> try_mwpm(const MatchGraph& graph);

// Exhaustive minimum over all perfect matchings; ties resolve to the
// lexicographically smallest pair list. Rejects n > 14.
Matching brute_force_mwpm(const MatchGraph& graph);

inline constexpr int kBruteForceMaxVertices = 14;

}  // namespace nmwpm
