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

#include "nmwpm/ground_truth.hpp"

#include <algorithm>
#include <array>
#include <chrono>
#include <limits>
#include <map>
#include <optional>
#include <queue>

#include "nmwpm/union_find.hpp"

namespace nmwpm {

namespace {

using Clock = std::chrono::steady_clock;

// Parity-changing toggles available on one pair: (route bit, parity delta).
std::vector<std::pair<std::uint8_t, std::uint32_t>> toggles(const MatchedPair& pair, const PathRouter& router) {
  std::vector<std::pair<std::uint8_t, std::uint32_t>> out;
  const std::uint8_t tied = router.tied_routes(pair);
  const std::uint32_t base = router.path_parity(pair);
  for (std::uint8_t bit : {std::uint8_t{1}, std::uint8_t{2}}) {
    if (!(tied & bit)) continue;
    MatchedPair alt = pair;
    alt.route ^= bit;
    const std::uint32_t delta = router.path_parity(alt) ^ base;
    if (delta) out.emplace_back(bit, delta);
  }
  return out;
}

// Parities reachable from `base` by XOR-ing any subset of `gens` (at most 2 bits wide).
std::uint32_t reachable_mask(std::uint32_t base, const std::vector<std::uint32_t>& gens) {
  std::uint32_t reach = 1u << base;
  for (std::uint32_t g : gens) {
    std::uint32_t next = reach;
    for (std::uint32_t p = 0; p < 4; ++p) {
      if (reach & (1u << p)) next |= 1u << (p ^ g);
    }
    reach = next;
  }
  return reach;
}

std::uint32_t class_target(const PauliFrame& frame, int cls, const PathRouter& router) {
  const PauliType err = router.error_type(cls);
  return logical_parity(frame.bits(err), err, router.lattice());
}

std::vector<int> class_defects(const Syndrome& syndrome, int cls, const CodeLattice& lattice) {
  const auto range = lattice.type_range(cls == 0 ? PauliType::X : PauliType::Z);
  std::vector<int> out;
  for (int i = range[0]; i < range[1]; ++i) {
    if (syndrome.bits[static_cast<std::size_t>(i)]) out.push_back(i);
  }
  return out;
}

struct Candidate {
  int weight = 0;
  std::vector<MatchedPair> pairs;
  std::uint32_t reach = 0;  // bitmask over achievable parities
};

// Matching graph over cluster endpoints. For the rotated code every endpoint
// also gets a private boundary copy; copies are mutually joined at weight 0.
struct ClusterGraph {
  MatchGraph graph;
  std::vector<std::uint8_t> is_copy;
  int m = 0;
};

ClusterGraph cluster_graph(const std::vector<int>& endpoints, const PathRouter& router) {
  ClusterGraph cg;
  cg.m = static_cast<int>(endpoints.size());
  const bool rotated = router.lattice().kind() == CodeKind::RotatedSurface;
  const int n = rotated ? 2 * cg.m : cg.m;
  cg.graph = MatchGraph(n, MatchGraph::kAbsent);
  cg.is_copy.assign(static_cast<std::size_t>(n), 0);
  for (int i = 0; i < cg.m; ++i) {
    for (int j = i + 1; j < cg.m; ++j) {
      cg.graph.set_weight(i, j, router.distance(endpoints[static_cast<std::size_t>(i)], endpoints[static_cast<std::size_t>(j)]));
    }
  }
  if (rotated) {
    for (int i = 0; i < cg.m; ++i) {
      cg.is_copy[static_cast<std::size_t>(cg.m + i)] = 1;
      cg.graph.set_weight(i, cg.m + i, router.boundary_distance(endpoints[static_cast<std::size_t>(i)]));
      for (int j = i + 1; j < cg.m; ++j) cg.graph.set_weight(cg.m + i, cg.m + j, 0.0);
    }
  }
  return cg;
}

std::vector<MatchedPair> to_pairs(const Matching& m, const ClusterGraph& cg, const std::vector<int>& endpoints) {
  std::vector<MatchedPair> out;
  for (auto [u, v] : m.pairs) {
    if (u >= cg.m && v >= cg.m) continue;
    const int a = endpoints[static_cast<std::size_t>(u)];
    if (v >= cg.m) {
      out.push_back({a, kBoundary, 0});
    } else {
      out.push_back({a, endpoints[static_cast<std::size_t>(v)], 0});
    }
  }
  return out;
}

Candidate make_candidate(std::vector<MatchedPair> pairs, const PathRouter& router) {
  Candidate c;
  std::uint32_t base = 0;
  std::vector<std::uint32_t> gens;
  for (const auto& p : pairs) {
    c.weight += router.path_length(p);
    base ^= router.path_parity(p);
    for (auto [bit, delta] : toggles(p, router)) gens.push_back(delta);
  }
  c.reach = reachable_mask(base, gens);
  c.pairs = std::move(pairs);
  return c;
}

class ClassLabeler {
 public:
  ClassLabeler(const PauliFrame& frame, const Syndrome& syndrome, int cls, const PathRouter& router,
               const GroundTruthOptions& options, std::optional<Clock::time_point>& deadline)
      : frame_(frame), syndrome_(syndrome), cls_(cls), router_(router), options_(options), deadline_(deadline) {
    target_ = class_target(frame, cls, router);
    defects_ = class_defects(syndrome, cls, router.lattice());
  }

  GroundTruthStatus run(std::vector<MatchedPair>& out, int& stage) {
    const bool rotated = router_.lattice().kind() == CodeKind::RotatedSurface;
    if (defects_.empty()) {
      stage = 0;
      return target_ == 0 ? GroundTruthStatus::Labeled : GroundTruthStatus::Infeasible;
    }
    std::vector<ErrorCluster> clusters;
    for (auto& c : cluster_errors(frame_, router_.lattice())) {
      if (c.cls == cls_ && !c.endpoints.empty()) clusters.push_back(std::move(c));
    }

    stage = 1;
    if (rotated) {
      try {
        out = rotated_virtual_matching(syndrome_, frame_, cls_, router_);
        return GroundTruthStatus::Labeled;
      } catch (const GroundTruthInfeasible&) {
      }
    } else {
      std::vector<MatchedPair> pairs;
      for (const auto& c : clusters) {
        const auto cg = cluster_graph(c.endpoints, router_);
        const auto m = to_pairs(mwpm(cg.graph), cg, c.endpoints);
        pairs.insert(pairs.end(), m.begin(), m.end());
      }
      if (fix_routes(pairs, target_, router_)) {
        out = std::move(pairs);
        return GroundTruthStatus::Labeled;
      }
    }

    stage = 2;
    if (permute_clusters(clusters, out)) return GroundTruthStatus::Labeled;

    stage = 3;
    return exhaustive(out);
  }

 private:
  // Cheapest combination of per-cluster k-best candidates hitting the target parity.
  bool permute_clusters(const std::vector<ErrorCluster>& clusters, std::vector<MatchedPair>& out) {
    constexpr int kInf = std::numeric_limits<int>::max();
    std::vector<std::vector<Candidate>> cands;
    for (const auto& c : clusters) {
      const auto cg = cluster_graph(c.endpoints, router_);
      std::vector<Candidate> list;
      for (const auto& m : k_best_matchings(cg.graph, options_.max_candidates, cg.is_copy)) {
        list.push_back(make_candidate(to_pairs(m, cg, c.endpoints), router_));
      }
      cands.push_back(std::move(list));
    }
    // dp over parity, one layer per cluster, with back-pointers.
    std::array<int, 4> dp{0, kInf, kInf, kInf};
    std::vector<std::array<std::pair<int, int>, 4>> back(cands.size());
    for (std::size_t k = 0; k < cands.size(); ++k) {
      std::array<int, 4> next{kInf, kInf, kInf, kInf};
      for (int par = 0; par < 4; ++par) {
        if (dp[static_cast<std::size_t>(par)] == kInf) continue;
        for (std::size_t ci = 0; ci < cands[k].size(); ++ci) {
          const auto& cand = cands[k][ci];
          for (std::uint32_t q = 0; q < 4; ++q) {
            if (!(cand.reach & (1u << q))) continue;
            const int np = par ^ static_cast<int>(q);
            const int w = dp[static_cast<std::size_t>(par)] + cand.weight;
            if (w < next[static_cast<std::size_t>(np)]) {
              next[static_cast<std::size_t>(np)] = w;
              back[k][static_cast<std::size_t>(np)] = {static_cast<int>(ci), par};
            }
          }
        }
      }
      dp = next;
    }
    if (dp[target_] == kInf) return false;
    std::vector<MatchedPair> pairs;
    int par = static_cast<int>(target_);
    for (std::size_t k = cands.size(); k-- > 0;) {
      const auto [ci, prev] = back[k][static_cast<std::size_t>(par)];
      const auto& cand = cands[k][static_cast<std::size_t>(ci)];
      pairs.insert(pairs.end(), cand.pairs.begin(), cand.pairs.end());
      par = prev;
    }
    if (!fix_routes(pairs, target_, router_)) return false;
    out = std::move(pairs);
    return true;
  }

  // Options for matching defect i with defect j (j >= 0) or a boundary
  // side (j = -1 - side): weight plus the reachable parity mask.
  struct Option {
    int weight;
    std::uint32_t reach;
  };

  Option pair_option(int i, int j) const {
    const int a = defects_[static_cast<std::size_t>(i)];
    if (j >= 0) {
      const MatchedPair p{a, defects_[static_cast<std::size_t>(j)], 0};
      std::vector<std::uint32_t> gens;
      for (auto [bit, delta] : toggles(p, router_)) gens.push_back(delta);
      return {router_.path_length(p), reachable_mask(router_.path_parity(p), gens)};
    }
    const int side = -1 - j;
    const std::uint8_t route = side == router_.nearest_boundary_side(a) ? 0 : 1;
    const MatchedPair p{a, kBoundary, route};
    return {router_.path_length(p), 1u << router_.path_parity(p)};
  }

  MatchedPair realize(int i, int j, std::uint32_t parity) const {
    const int a = defects_[static_cast<std::size_t>(i)];
    if (j < 0) {
      const int side = -1 - j;
      return {a, kBoundary, static_cast<std::uint8_t>(side == router_.nearest_boundary_side(a) ? 0 : 1)};
    }
    MatchedPair p{a, defects_[static_cast<std::size_t>(j)], 0};
    for (std::uint8_t route = 0; route < 4; ++route) {
      p.route = route;
      if ((router_.tied_routes(p) | route) != router_.tied_routes(p)) continue;
      if (router_.path_parity(p) == parity) return p;
    }
    throw std::logic_error("unreachable pair parity");
  }

  bool out_of_time() {
    if (!deadline_) {
      deadline_ = Clock::now() + std::chrono::duration_cast<Clock::duration>(
                                     std::chrono::duration<double, std::milli>(options_.brute_force_budget_ms));
    }
    return Clock::now() > *deadline_;
  }

  // Exact search over every pairing of the class defects (and, for the
  // rotated code, either boundary side) for the lightest valid one.
  GroundTruthStatus exhaustive(std::vector<MatchedPair>& out) {
    const int k = static_cast<int>(defects_.size());
    const bool rotated = router_.lattice().kind() == CodeKind::RotatedSurface;
    if (out_of_time() || k > options_.max_brute_force_defects) return GroundTruthStatus::Timeout;
    constexpr int kInf = std::numeric_limits<int>::max();
    const std::size_t nmask = std::size_t{1} << k;
    const int full = static_cast<int>(nmask - 1);

    // Precomputed options: index i*k + j for pairs, boundary sides separately.
    std::vector<Option> pair_opts(static_cast<std::size_t>(k * k), Option{0, 0});
    std::vector<Option> bnd_opts(static_cast<std::size_t>(2 * k), Option{0, 0});
    for (int i = 0; i < k; ++i) {
      for (int j = i + 1; j < k; ++j) pair_opts[static_cast<std::size_t>(i * k + j)] = pair_option(i, j);
      if (rotated) {
        for (int s = 0; s < 2; ++s) bnd_opts[static_cast<std::size_t>(2 * i + s)] = pair_option(i, -1 - s);
      }
    }

    std::vector<int> dp(nmask * 4, kInf);
    dp[0] = 0;
    auto relax = [&](std::size_t to, int par, int w) {
      auto& cell = dp[to * 4 + static_cast<std::size_t>(par)];
      if (w < cell) cell = w;
    };
    for (std::size_t mask = 0; mask < nmask; ++mask) {
      if ((mask & 1023) == 0 && out_of_time()) return GroundTruthStatus::Timeout;
      if (static_cast<int>(mask) == full) break;
      int i = 0;
      while (mask & (std::size_t{1} << i)) ++i;
      for (int par = 0; par < 4; ++par) {
        const int cur = dp[mask * 4 + static_cast<std::size_t>(par)];
        if (cur == kInf) continue;
        for (int j = i + 1; j < k; ++j) {
          if (mask & (std::size_t{1} << j)) continue;
          const auto& opt = pair_opts[static_cast<std::size_t>(i * k + j)];
          const std::size_t to = mask | (std::size_t{1} << i) | (std::size_t{1} << j);
          for (std::uint32_t q = 0; q < 4; ++q) {
            if (opt.reach & (1u << q)) relax(to, par ^ static_cast<int>(q), cur + opt.weight);
          }
        }
        if (rotated) {
          for (int s = 0; s < 2; ++s) {
            const auto& opt = bnd_opts[static_cast<std::size_t>(2 * i + s)];
            const std::size_t to = mask | (std::size_t{1} << i);
            for (std::uint32_t q = 0; q < 2; ++q) {
              if (opt.reach & (1u << q)) relax(to, par ^ static_cast<int>(q), cur + opt.weight);
            }
          }
        }
      }
    }
    if (dp[static_cast<std::size_t>(full) * 4 + target_] == kInf) return GroundTruthStatus::Infeasible;

    // Walk back: find a predecessor state consistent with each dp value.
    std::vector<MatchedPair> pairs;
    std::size_t mask = static_cast<std::size_t>(full);
    int par = static_cast<int>(target_);
    while (mask) {
      const int cur = dp[mask * 4 + static_cast<std::size_t>(par)];
      bool found = false;
      for (int i = 0; i < k && !found; ++i) {
        if (!(mask & (std::size_t{1} << i))) continue;
        auto lowest_free = [&](std::size_t m) {
          int b = 0;
          while (m & (std::size_t{1} << b)) ++b;
          return b;
        };
        std::vector<int> partners;
        for (int j = i + 1; j < k; ++j) {
          if (mask & (std::size_t{1} << j)) partners.push_back(j);
        }
        if (rotated) partners.insert(partners.end(), {-1, -2});
        for (int j : partners) {
          const std::size_t prev = j >= 0 ? mask & ~(std::size_t{1} << i) & ~(std::size_t{1} << j)
                                          : mask & ~(std::size_t{1} << i);
          if (lowest_free(prev) != i) continue;
          const auto& opt = j >= 0 ? pair_opts[static_cast<std::size_t>(i * k + j)]
                                   : bnd_opts[static_cast<std::size_t>(2 * i + (-1 - j))];
          for (std::uint32_t q = 0; q < 4 && !found; ++q) {
            if (!(opt.reach & (1u << q))) continue;
            const int pp = par ^ static_cast<int>(q);
            const int before = dp[prev * 4 + static_cast<std::size_t>(pp)];
            if (before != kInf && before + opt.weight == cur) {
              pairs.push_back(realize(i, j, q));
              mask = prev;
              par = pp;
              found = true;
            }
          }
          if (found) break;
        }
      }
      if (!found) throw std::logic_error("exhaustive ground truth reconstruction failed");
    }
    out = std::move(pairs);
    return GroundTruthStatus::Labeled;
  }

  const PauliFrame& frame_;
  const Syndrome& syndrome_;
  int cls_;
  const PathRouter& router_;
  const GroundTruthOptions& options_;
  std::optional<Clock::time_point>& deadline_;
  std::uint32_t target_ = 0;
  std::vector<int> defects_;
};

}  // namespace

std::vector<ErrorCluster> cluster_errors(const PauliFrame& frame, const CodeLattice& lattice) {
  if (frame.size() != lattice.num_qubits()) throw std::invalid_argument("frame does not match lattice");
  std::vector<ErrorCluster> out;
  for (PauliType err : {PauliType::X, PauliType::Z}) {
    const PauliType stab_type = err == PauliType::X ? PauliType::Z : PauliType::X;
    const auto& bits = frame.bits(err);
    UnionFind uf(lattice.num_qubits());
    const auto range = lattice.type_range(stab_type);
    for (int s = range[0]; s < range[1]; ++s) {
      int first = -1;
      for (int q : lattice.stabilizer(s).support) {
        if (!bits[static_cast<std::size_t>(q)]) continue;
        if (first < 0) {
          first = q;
        } else {
          uf.unite(first, q);
        }
      }
    }
    std::map<int, std::size_t> root_to_cluster;
    const std::size_t offset = out.size();
    for (int q = 0; q < lattice.num_qubits(); ++q) {
      if (!bits[static_cast<std::size_t>(q)]) continue;
      const int r = uf.find(q);
      auto it = root_to_cluster.find(r);
      if (it == root_to_cluster.end()) {
        it = root_to_cluster.emplace(r, out.size()).first;
        ErrorCluster c;
        c.error_type = err;
        c.cls = class_of(stab_type);
        out.push_back(std::move(c));
      }
      out[it->second].qubits.push_back(q);
    }
    for (std::size_t c = offset; c < out.size(); ++c) {
      std::map<int, int> touch;
      for (int q : out[c].qubits) {
        for (int s : lattice.stabilizers_on_qubit(q, stab_type)) touch[s] ^= 1;
      }
      for (auto [s, odd] : touch) {
        if (odd) out[c].endpoints.push_back(s);
      }
    }
  }
  return out;
}

bool fix_routes(std::vector<MatchedPair>& pairs, std::uint32_t target, const PathRouter& router) {
  std::uint32_t parity = 0;
  for (const auto& p : pairs) parity ^= router.path_parity(p);
  std::uint32_t need = parity ^ target;
  if (!need) return true;
  // GF(2) basis over the toggles, each basis vector remembering its toggle set.
  struct Basis {
    std::uint32_t vec;
    std::vector<std::pair<std::size_t, std::uint8_t>> combo;
  };
  std::vector<Basis> basis;
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    for (auto [bit, delta] : toggles(pairs[i], router)) {
      Basis cand{delta, {{i, bit}}};
      for (const auto& b : basis) {
        if ((cand.vec ^ b.vec) < cand.vec) {
          cand.vec ^= b.vec;
          cand.combo.insert(cand.combo.end(), b.combo.begin(), b.combo.end());
        }
      }
      if (cand.vec) {
        basis.push_back(std::move(cand));
        std::sort(basis.begin(), basis.end(), [](const Basis& a, const Basis& b) { return a.vec > b.vec; });
      }
    }
  }
  std::vector<std::pair<std::size_t, std::uint8_t>> apply;
  for (const auto& b : basis) {
    if ((need ^ b.vec) < need) {
      need ^= b.vec;
      apply.insert(apply.end(), b.combo.begin(), b.combo.end());
    }
  }
  if (need) return false;
  for (auto [i, bit] : apply) pairs[i].route ^= bit;
  return true;
}

bool is_valid_correction(const PauliFrame& frame, const SyndromeMatching& matching, const PathRouter& router) {
  const auto& lat = router.lattice();
  const PauliFrame residual = frame ^ router.correction(matching);
  if (extract_syndrome(residual, lat).any()) return false;
  return !is_logical_error(residual, PauliFrame(lat.num_qubits()), lat);
}

std::vector<MatchedPair> rotated_virtual_matching(const Syndrome& syndrome, const PauliFrame& frame, int cls,
                                                  const PathRouter& router) {
  const auto& lat = router.lattice();
  if (lat.kind() != CodeKind::RotatedSurface) throw std::invalid_argument("virtual matching needs the rotated code");
  const auto defects = class_defects(syndrome, cls, lat);
  const std::uint32_t target = class_target(frame, cls, router);
  const int n = static_cast<int>(defects.size());
  for (int v = n % 2; v <= n; v += 2) {
    MatchGraph g(n + v, 0.0);
    for (int i = 0; i < n; ++i) {
      for (int j = i + 1; j < n; ++j) {
        g.set_weight(i, j, router.distance(defects[static_cast<std::size_t>(i)], defects[static_cast<std::size_t>(j)]));
      }
      for (int u = 0; u < v; ++u) g.set_weight(i, n + u, router.boundary_distance(defects[static_cast<std::size_t>(i)]));
    }
    std::vector<MatchedPair> pairs;
    for (auto [a, b] : mwpm(g).pairs) {
      if (a >= n) continue;
      pairs.push_back(b >= n ? MatchedPair{defects[static_cast<std::size_t>(a)], kBoundary, 0}
                             : MatchedPair{defects[static_cast<std::size_t>(a)], defects[static_cast<std::size_t>(b)], 0});
    }
    if (fix_routes(pairs, target, router)) return pairs;
  }
  throw GroundTruthInfeasible("no virtual-node count yields a valid matching");
}

std::vector<Matching> k_best_matchings(const MatchGraph& graph, int k,
                                       const std::vector<std::uint8_t>& interchangeable) {
  struct Node {
    double weight;
    std::uint64_t order;
    Matching matching;
    std::vector<std::pair<int, int>> forced;
    std::vector<std::pair<int, int>> excluded;
  };
  auto cmp = [](const Node& a, const Node& b) {
    return a.weight != b.weight ? a.weight > b.weight : a.order > b.order;
  };
  std::priority_queue<Node, std::vector<Node>, decltype(cmp)> heap(cmp);
  std::uint64_t counter = 0;
  const int n = graph.size();

  auto solve = [&](std::vector<std::pair<int, int>> forced, std::vector<std::pair<int, int>> excluded) {
    MatchGraph g = graph;
    for (auto [u, v] : excluded) g.set_weight(u, v, MatchGraph::kAbsent);
    for (auto [u, v] : forced) {
      for (int x = 0; x < n; ++x) {
        if (x != v && x != u) g.set_weight(u, x, MatchGraph::kAbsent);
        if (x != u && x != v) g.set_weight(v, x, MatchGraph::kAbsent);
      }
    }
    auto m = try_mwpm(g);
    if (!m) return;
    const double w = m->total_weight(graph);
    heap.push(Node{w, counter++, std::move(*m), std::move(forced), std::move(excluded)});
  };
  auto swappable = [&](int u, int v) {
    return !interchangeable.empty() && interchangeable[static_cast<std::size_t>(u)] &&
           interchangeable[static_cast<std::size_t>(v)];
  };

  std::vector<Matching> out;
  solve({}, {});
  while (!heap.empty() && static_cast<int>(out.size()) < k) {
    Node node = heap.top();
    heap.pop();
    out.push_back(node.matching);
    std::vector<std::pair<int, int>> free_edges;
    for (const auto& e : node.matching.pairs) {
      if (swappable(e.first, e.second)) continue;
      if (std::find(node.forced.begin(), node.forced.end(), e) != node.forced.end()) continue;
      free_edges.push_back(e);
    }
    auto forced = node.forced;
    for (const auto& e : free_edges) {
      auto excluded = node.excluded;
      excluded.push_back(e);
      solve(forced, std::move(excluded));
      forced.push_back(e);
    }
  }
  return out;
}

GroundTruthResult label_shot(const PauliFrame& frame, const PathRouter& router, const GroundTruthOptions& options) {
  const auto& lat = router.lattice();
  const Syndrome syndrome = extract_syndrome(frame, lat);
  GroundTruthResult result;
  std::optional<Clock::time_point> deadline;
  for (int cls = 0; cls < kNumClasses; ++cls) {
    ClassLabeler labeler(frame, syndrome, cls, router, options, deadline);
    int stage = 0;
    const auto status = labeler.run(result.matching.classes[static_cast<std::size_t>(cls)], stage);
    result.stage = std::max(result.stage, stage);
    if (status != GroundTruthStatus::Labeled) {
      result.status = status;
      result.matching = {};
      return result;
    }
  }
  result.matching.canonicalize();
  return result;
}

SyndromeMatching ground_truth_matching(const PauliFrame& frame, const PathRouter& router,
                                       const GroundTruthOptions& options) {
  auto r = label_shot(frame, router, options);
  if (r.status == GroundTruthStatus::Timeout) throw GroundTruthTimeout("ground truth search exceeded its budget");
  if (r.status == GroundTruthStatus::Infeasible) throw GroundTruthInfeasible("no logically valid matching found");
  return std::move(r.matching);
}

}  // namespace nmwpm
