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

#include "nmwpm/blossom.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <stdexcept>

namespace nmwpm {

void Matching::canonicalize() {
  for (auto& p : pairs) {
    if (p.second < p.first) std::swap(p.first, p.second);
  }
  std::sort(pairs.begin(), pairs.end());
}

double Matching::total_weight(const MatchGraph& graph) const {
  Matching sorted = *this;
  sorted.canonicalize();
  double total = 0.0;
  for (auto [u, v] : sorted.pairs) total += graph.weight(u, v);
  return total;
}

bool Matching::is_perfect(int n_vertices) const {
  std::vector<int> seen(static_cast<std::size_t>(n_vertices), 0);
  for (auto [u, v] : pairs) {
    if (u < 0 || v < 0 || u >= n_vertices || v >= n_vertices || u == v) return false;
    if (seen[static_cast<std::size_t>(u)]++ || seen[static_cast<std::size_t>(v)]++) return false;
  }
  return 2 * pairs.size() == static_cast<std::size_t>(n_vertices);
}

namespace {

// Maximum-weight matching over an explicit edge list, with maximum
// cardinality taking precedence. Follows the primal-dual formulation of
// Galil's "Efficient algorithms for finding maximum matching in graphs"
// (vertex duals, blossom duals, S/T labels, least-slack edge tracking).
// Endpoint p of edge k is vertex endpoint_[p]; p = 2k is the first vertex,
// p = 2k + 1 the second.
class BlossomSolver {
 public:
  struct Edge {
    int i, j;
    double w;
  };

  BlossomSolver(int n, std::vector<Edge> edges) : n_(n), edges_(std::move(edges)) {}

  std::vector<int> solve() {
    const int nedge = static_cast<int>(edges_.size());
    double maxweight = 0.0;
    for (const auto& e : edges_) maxweight = std::max(maxweight, e.w);
    endpoint_.resize(static_cast<std::size_t>(2 * nedge));
    neighbend_.assign(static_cast<std::size_t>(n_), {});
    for (int k = 0; k < nedge; ++k) {
      endpoint_[static_cast<std::size_t>(2 * k)] = edges_[static_cast<std::size_t>(k)].i;
      endpoint_[static_cast<std::size_t>(2 * k + 1)] = edges_[static_cast<std::size_t>(k)].j;
      neighbend_[static_cast<std::size_t>(edges_[static_cast<std::size_t>(k)].i)].push_back(2 * k + 1);
      neighbend_[static_cast<std::size_t>(edges_[static_cast<std::size_t>(k)].j)].push_back(2 * k);
    }
    const auto n2 = static_cast<std::size_t>(2 * n_);
    mate_.assign(static_cast<std::size_t>(n_), -1);
    label_.assign(n2, 0);
    labelend_.assign(n2, -1);
    inblossom_.resize(static_cast<std::size_t>(n_));
    for (int v = 0; v < n_; ++v) inblossom_[static_cast<std::size_t>(v)] = v;
    blossomparent_.assign(n2, -1);
    blossomchilds_.assign(n2, {});
    blossombase_.assign(n2, -1);
    for (int v = 0; v < n_; ++v) blossombase_[static_cast<std::size_t>(v)] = v;
    blossomendps_.assign(n2, {});
    bestedge_.assign(n2, -1);
    blossombestedges_.assign(n2, {});
    has_bestedges_.assign(n2, false);
    unusedblossoms_.clear();
    for (int b = n_; b < 2 * n_; ++b) unusedblossoms_.push_back(b);
    dualvar_.assign(n2, 0.0);
    for (int v = 0; v < n_; ++v) dualvar_[static_cast<std::size_t>(v)] = maxweight;
    allowedge_.assign(static_cast<std::size_t>(nedge), false);

    for (int stage = 0; stage < n_; ++stage) {
      std::fill(label_.begin(), label_.end(), 0);
      std::fill(bestedge_.begin(), bestedge_.end(), -1);
      for (int b = n_; b < 2 * n_; ++b) {
        blossombestedges_[static_cast<std::size_t>(b)].clear();
        has_bestedges_[static_cast<std::size_t>(b)] = false;
      }
      std::fill(allowedge_.begin(), allowedge_.end(), false);
      queue_.clear();
      for (int v = 0; v < n_; ++v) {
        if (mate_[static_cast<std::size_t>(v)] == -1 && label_[static_cast<std::size_t>(in(v))] == 0) {
          assign_label(v, 1, -1);
        }
      }
      bool augmented = false;
      while (true) {
        while (!queue_.empty() && !augmented) {
          const int v = queue_.back();
          queue_.pop_back();
          for (int p : neighbend_[static_cast<std::size_t>(v)]) {
            const int k = p / 2;
            const int w = endpoint_[static_cast<std::size_t>(p)];
            if (in(v) == in(w)) continue;
            double kslack = 0.0;
            if (!allowedge_[static_cast<std::size_t>(k)]) {
              kslack = slack(k);
              if (kslack <= 0.0) allowedge_[static_cast<std::size_t>(k)] = true;
            }
            if (allowedge_[static_cast<std::size_t>(k)]) {
              if (label_[static_cast<std::size_t>(in(w))] == 0) {
                assign_label(w, 2, p ^ 1);
              } else if (label_[static_cast<std::size_t>(in(w))] == 1) {
                const int base = scan_blossom(v, w);
                if (base >= 0) {
                  add_blossom(base, k);
                } else {
                  augment_matching(k);
                  augmented = true;
                  break;
                }
              } else if (label_[static_cast<std::size_t>(w)] == 0) {
                label_[static_cast<std::size_t>(w)] = 2;
                labelend_[static_cast<std::size_t>(w)] = p ^ 1;
              }
            } else if (label_[static_cast<std::size_t>(in(w))] == 1) {
              const int b = in(v);
              if (bestedge_[static_cast<std::size_t>(b)] == -1 || kslack < slack(bestedge_[static_cast<std::size_t>(b)])) {
                bestedge_[static_cast<std::size_t>(b)] = k;
              }
            } else if (label_[static_cast<std::size_t>(w)] == 0) {
              if (bestedge_[static_cast<std::size_t>(w)] == -1 || kslack < slack(bestedge_[static_cast<std::size_t>(w)])) {
                bestedge_[static_cast<std::size_t>(w)] = k;
              }
            }
          }
        }
        if (augmented) break;

        // No augmenting path under the current duals: pick the dual step.
        int deltatype = -1;
        double delta = 0.0;
        int deltaedge = -1, deltablossom = -1;
        for (int v = 0; v < n_; ++v) {
          if (label_[static_cast<std::size_t>(in(v))] == 0 && bestedge_[static_cast<std::size_t>(v)] != -1) {
            const double d = slack(bestedge_[static_cast<std::size_t>(v)]);
            if (deltatype == -1 || d < delta) {
              delta = d;
              deltatype = 2;
              deltaedge = bestedge_[static_cast<std::size_t>(v)];
            }
          }
        }
        for (int b = 0; b < 2 * n_; ++b) {
          const auto bi = static_cast<std::size_t>(b);
          if (blossomparent_[bi] == -1 && label_[bi] == 1 && bestedge_[bi] != -1) {
            const double d = slack(bestedge_[bi]) / 2.0;
            if (deltatype == -1 || d < delta) {
              delta = d;
              deltatype = 3;
              deltaedge = bestedge_[bi];
            }
          }
        }
        for (int b = n_; b < 2 * n_; ++b) {
          const auto bi = static_cast<std::size_t>(b);
          if (blossombase_[bi] >= 0 && blossomparent_[bi] == -1 && label_[bi] == 2 &&
              (deltatype == -1 || dualvar_[bi] < delta)) {
            delta = dualvar_[bi];
            deltatype = 4;
            deltablossom = b;
          }
        }
        if (deltatype == -1) {
          // Maximum cardinality reached; final dual step to optimality.
          deltatype = 1;
          delta = *std::min_element(dualvar_.begin(), dualvar_.begin() + n_);
          delta = std::max(0.0, delta);
        }

        for (int v = 0; v < n_; ++v) {
          const int l = label_[static_cast<std::size_t>(in(v))];
          if (l == 1) {
            dualvar_[static_cast<std::size_t>(v)] -= delta;
          } else if (l == 2) {
            dualvar_[static_cast<std::size_t>(v)] += delta;
          }
        }
        for (int b = n_; b < 2 * n_; ++b) {
          const auto bi = static_cast<std::size_t>(b);
          if (blossombase_[bi] >= 0 && blossomparent_[bi] == -1) {
            if (label_[bi] == 1) {
              dualvar_[bi] += delta;
            } else if (label_[bi] == 2) {
              dualvar_[bi] -= delta;
            }
          }
        }

        if (deltatype == 1) break;
        if (deltatype == 2) {
          allowedge_[static_cast<std::size_t>(deltaedge)] = true;
          int i = edges_[static_cast<std::size_t>(deltaedge)].i;
          int j = edges_[static_cast<std::size_t>(deltaedge)].j;
          if (label_[static_cast<std::size_t>(in(i))] == 0) std::swap(i, j);
          queue_.push_back(i);
        } else if (deltatype == 3) {
          allowedge_[static_cast<std::size_t>(deltaedge)] = true;
          queue_.push_back(edges_[static_cast<std::size_t>(deltaedge)].i);
        } else {
          expand_blossom(deltablossom, false);
        }
      }
      if (!augmented) break;

      // Expand S-blossoms whose dual reached zero at the end of the stage.
      for (int b = n_; b < 2 * n_; ++b) {
        const auto bi = static_cast<std::size_t>(b);
        if (blossomparent_[bi] == -1 && blossombase_[bi] >= 0 && label_[bi] == 1 && dualvar_[bi] == 0.0) {
          expand_blossom(b, true);
        }
      }
    }

    std::vector<int> out(static_cast<std::size_t>(n_), -1);
    for (int v = 0; v < n_; ++v) {
      if (mate_[static_cast<std::size_t>(v)] >= 0) {
        out[static_cast<std::size_t>(v)] = endpoint_[static_cast<std::size_t>(mate_[static_cast<std::size_t>(v)])];
      }
    }
    return out;
  }

 private:
  int in(int v) const { return inblossom_[static_cast<std::size_t>(v)]; }

  double slack(int k) const {
    const auto& e = edges_[static_cast<std::size_t>(k)];
    return dualvar_[static_cast<std::size_t>(e.i)] + dualvar_[static_cast<std::size_t>(e.j)] - 2.0 * e.w;
  }

  void blossom_leaves(int b, std::vector<int>& out) const {
    if (b < n_) {
      out.push_back(b);
      return;
    }
    for (int t : blossomchilds_[static_cast<std::size_t>(b)]) blossom_leaves(t, out);
  }

  std::vector<int> leaves(int b) const {
    std::vector<int> out;
    blossom_leaves(b, out);
    return out;
  }

  void assign_label(int w, int t, int p) {
    const int b = in(w);
    label_[static_cast<std::size_t>(w)] = label_[static_cast<std::size_t>(b)] = t;
    labelend_[static_cast<std::size_t>(w)] = labelend_[static_cast<std::size_t>(b)] = p;
    bestedge_[static_cast<std::size_t>(w)] = bestedge_[static_cast<std::size_t>(b)] = -1;
    if (t == 1) {
      blossom_leaves(b, queue_);
    } else if (t == 2) {
      const int base = blossombase_[static_cast<std::size_t>(b)];
      const int mb = mate_[static_cast<std::size_t>(base)];
      assign_label(endpoint_[static_cast<std::size_t>(mb)], 1, mb ^ 1);
    }
  }

  // Trace back from v and w to find a common S-ancestor (new blossom base)
  // or -1 if the two paths reach distinct roots (augmenting path).
  int scan_blossom(int v, int w) {
    std::vector<int> path;
    int base = -1;
    while (v != -1 || w != -1) {
      int b = in(v);
      if (label_[static_cast<std::size_t>(b)] & 4) {
        base = blossombase_[static_cast<std::size_t>(b)];
        break;
      }
      path.push_back(b);
      label_[static_cast<std::size_t>(b)] = 5;
      if (labelend_[static_cast<std::size_t>(b)] == -1) {
        v = -1;
      } else {
        v = endpoint_[static_cast<std::size_t>(labelend_[static_cast<std::size_t>(b)])];
        b = in(v);
        v = endpoint_[static_cast<std::size_t>(labelend_[static_cast<std::size_t>(b)])];
      }
      if (w != -1) std::swap(v, w);
    }
    for (int b : path) label_[static_cast<std::size_t>(b)] = 1;
    return base;
  }

  void add_blossom(int base, int k) {
    int v = edges_[static_cast<std::size_t>(k)].i;
    int w = edges_[static_cast<std::size_t>(k)].j;
    const int bb = in(base);
    int bv = in(v);
    int bw = in(w);
    const int b = unusedblossoms_.back();
    unusedblossoms_.pop_back();
    const auto bi = static_cast<std::size_t>(b);
    blossombase_[bi] = base;
    blossomparent_[bi] = -1;
    blossomparent_[static_cast<std::size_t>(bb)] = b;
    auto& path = blossomchilds_[bi];
    auto& endps = blossomendps_[bi];
    path.clear();
    endps.clear();
    while (bv != bb) {
      blossomparent_[static_cast<std::size_t>(bv)] = b;
      path.push_back(bv);
      endps.push_back(labelend_[static_cast<std::size_t>(bv)]);
      v = endpoint_[static_cast<std::size_t>(labelend_[static_cast<std::size_t>(bv)])];
      bv = in(v);
    }
    path.push_back(bb);
    std::reverse(path.begin(), path.end());
    std::reverse(endps.begin(), endps.end());
    endps.push_back(2 * k);
    while (bw != bb) {
      blossomparent_[static_cast<std::size_t>(bw)] = b;
      path.push_back(bw);
      endps.push_back(labelend_[static_cast<std::size_t>(bw)] ^ 1);
      w = endpoint_[static_cast<std::size_t>(labelend_[static_cast<std::size_t>(bw)])];
      bw = in(w);
    }
    label_[bi] = 1;
    labelend_[bi] = labelend_[static_cast<std::size_t>(bb)];
    dualvar_[bi] = 0.0;
    for (int leaf : leaves(b)) {
      if (label_[static_cast<std::size_t>(in(leaf))] == 2) queue_.push_back(leaf);
      inblossom_[static_cast<std::size_t>(leaf)] = b;
    }

    std::vector<int> bestedgeto(static_cast<std::size_t>(2 * n_), -1);
    for (int sub : path) {
      const auto si = static_cast<std::size_t>(sub);
      std::vector<std::vector<int>> nblists;
      if (!has_bestedges_[si]) {
        for (int leaf : leaves(sub)) {
          std::vector<int> list;
          for (int p : neighbend_[static_cast<std::size_t>(leaf)]) list.push_back(p / 2);
          nblists.push_back(std::move(list));
        }
      } else {
        nblists.push_back(blossombestedges_[si]);
      }
      for (const auto& nblist : nblists) {
        for (int kk : nblist) {
          int i = edges_[static_cast<std::size_t>(kk)].i;
          int j = edges_[static_cast<std::size_t>(kk)].j;
          if (in(j) == b) std::swap(i, j);
          const int bj = in(j);
          const auto bji = static_cast<std::size_t>(bj);
          if (bj != b && label_[bji] == 1 &&
              (bestedgeto[bji] == -1 || slack(kk) < slack(bestedgeto[bji]))) {
            bestedgeto[bji] = kk;
          }
        }
      }
      blossombestedges_[si].clear();
      has_bestedges_[si] = false;
      bestedge_[si] = -1;
    }
    auto& best = blossombestedges_[bi];
    best.clear();
    for (int kk : bestedgeto) {
      if (kk != -1) best.push_back(kk);
    }
    has_bestedges_[bi] = true;
    bestedge_[bi] = -1;
    for (int kk : best) {
      if (bestedge_[bi] == -1 || slack(kk) < slack(bestedge_[bi])) bestedge_[bi] = kk;
    }
  }

  void expand_blossom(int b, bool endstage) {
    const auto bi = static_cast<std::size_t>(b);
    const std::vector<int> childs = blossomchilds_[bi];
    for (int s : childs) {
      blossomparent_[static_cast<std::size_t>(s)] = -1;
      if (s < n_) {
        inblossom_[static_cast<std::size_t>(s)] = s;
      } else if (endstage && dualvar_[static_cast<std::size_t>(s)] == 0.0) {
        expand_blossom(s, endstage);
      } else {
        for (int leaf : leaves(s)) inblossom_[static_cast<std::size_t>(leaf)] = s;
      }
    }
    if (!endstage && label_[bi] == 2) {
      const auto& ch = blossomchilds_[bi];
      const auto& ep = blossomendps_[bi];
      const int len = static_cast<int>(ch.size());
      auto at = [len](int j) { return static_cast<std::size_t>(((j % len) + len) % len); };
      const int entrychild = in(endpoint_[static_cast<std::size_t>(labelend_[bi] ^ 1)]);
      int j = static_cast<int>(std::find(ch.begin(), ch.end(), entrychild) - ch.begin());
      int jstep, endptrick;
      if (j & 1) {
        j -= len;
        jstep = 1;
        endptrick = 0;
      } else {
        jstep = -1;
        endptrick = 1;
      }
      int p = labelend_[bi];
      while (j != 0) {
        label_[static_cast<std::size_t>(endpoint_[static_cast<std::size_t>(p ^ 1)])] = 0;
        label_[static_cast<std::size_t>(
            endpoint_[static_cast<std::size_t>(ep[at(j - endptrick)] ^ endptrick ^ 1)])] = 0;
        assign_label(endpoint_[static_cast<std::size_t>(p ^ 1)], 2, p);
        allowedge_[static_cast<std::size_t>(ep[at(j - endptrick)] / 2)] = true;
        j += jstep;
        p = ep[at(j - endptrick)] ^ endptrick;
        allowedge_[static_cast<std::size_t>(p / 2)] = true;
        j += jstep;
      }
      int bv = ch[at(j)];
      label_[static_cast<std::size_t>(endpoint_[static_cast<std::size_t>(p ^ 1)])] = label_[static_cast<std::size_t>(bv)] = 2;
      labelend_[static_cast<std::size_t>(endpoint_[static_cast<std::size_t>(p ^ 1)])] =
          labelend_[static_cast<std::size_t>(bv)] = p;
      bestedge_[static_cast<std::size_t>(bv)] = -1;
      j += jstep;
      while (ch[at(j)] != entrychild) {
        bv = ch[at(j)];
        if (label_[static_cast<std::size_t>(bv)] == 1) {
          j += jstep;
          continue;
        }
        int reached = -1;
        for (int leaf : leaves(bv)) {
          if (label_[static_cast<std::size_t>(leaf)] != 0) {
            reached = leaf;
            break;
          }
        }
        if (reached >= 0) {
          label_[static_cast<std::size_t>(reached)] = 0;
          label_[static_cast<std::size_t>(endpoint_[static_cast<std::size_t>(
              mate_[static_cast<std::size_t>(blossombase_[static_cast<std::size_t>(bv)])])])] = 0;
          assign_label(reached, 2, labelend_[static_cast<std::size_t>(reached)]);
        }
        j += jstep;
      }
    }
    label_[bi] = labelend_[bi] = -1;
    blossomchilds_[bi].clear();
    blossomendps_[bi].clear();
    blossombase_[bi] = -1;
    blossombestedges_[bi].clear();
    has_bestedges_[bi] = false;
    bestedge_[bi] = -1;
    unusedblossoms_.push_back(b);
  }

  // Swap matched/unmatched edges along the even path from v to the base of b.
  void augment_blossom(int b, int v) {
    const auto bi = static_cast<std::size_t>(b);
    int t = v;
    while (blossomparent_[static_cast<std::size_t>(t)] != b) t = blossomparent_[static_cast<std::size_t>(t)];
    if (t >= n_) augment_blossom(t, v);
    auto& ch = blossomchilds_[bi];
    auto& ep = blossomendps_[bi];
    const int len = static_cast<int>(ch.size());
    auto at = [len](int j) { return static_cast<std::size_t>(((j % len) + len) % len); };
    const int i = static_cast<int>(std::find(ch.begin(), ch.end(), t) - ch.begin());
    int j = i;
    int jstep, endptrick;
    if (i & 1) {
      j -= len;
      jstep = 1;
      endptrick = 0;
    } else {
      jstep = -1;
      endptrick = 1;
    }
    while (j != 0) {
      j += jstep;
      t = ch[at(j)];
      const int p = ep[at(j - endptrick)] ^ endptrick;
      if (t >= n_) augment_blossom(t, endpoint_[static_cast<std::size_t>(p)]);
      j += jstep;
      t = ch[at(j)];
      if (t >= n_) augment_blossom(t, endpoint_[static_cast<std::size_t>(p ^ 1)]);
      mate_[static_cast<std::size_t>(endpoint_[static_cast<std::size_t>(p)])] = p ^ 1;
      mate_[static_cast<std::size_t>(endpoint_[static_cast<std::size_t>(p ^ 1)])] = p;
    }
    std::rotate(ch.begin(), ch.begin() + i, ch.end());
    std::rotate(ep.begin(), ep.begin() + i, ep.end());
    blossombase_[bi] = blossombase_[static_cast<std::size_t>(ch[0])];
  }

  void augment_matching(int k) {
    const int v0 = edges_[static_cast<std::size_t>(k)].i;
    const int w0 = edges_[static_cast<std::size_t>(k)].j;
    const std::pair<int, int> starts[2] = {{v0, 2 * k + 1}, {w0, 2 * k}};
    for (auto [s, p] : starts) {
      while (true) {
        const int bs = in(s);
        if (bs >= n_) augment_blossom(bs, s);
        mate_[static_cast<std::size_t>(s)] = p;
        if (labelend_[static_cast<std::size_t>(bs)] == -1) break;
        const int t = endpoint_[static_cast<std::size_t>(labelend_[static_cast<std::size_t>(bs)])];
        const int bt = in(t);
        const int le = labelend_[static_cast<std::size_t>(bt)];
        s = endpoint_[static_cast<std::size_t>(le)];
        const int j = endpoint_[static_cast<std::size_t>(le ^ 1)];
        if (bt >= n_) augment_blossom(bt, j);
        mate_[static_cast<std::size_t>(j)] = le;
        p = le ^ 1;
      }
    }
  }

  int n_;
  std::vector<Edge> edges_;
  std::vector<int> endpoint_;
  std::vector<std::vector<int>> neighbend_;
  std::vector<int> mate_, label_, labelend_, inblossom_, blossomparent_, blossombase_, bestedge_;
  std::vector<std::vector<int>> blossomchilds_, blossomendps_, blossombestedges_;
  std::vector<bool> has_bestedges_;
  std::vector<int> unusedblossoms_;
  std::vector<double> dualvar_;
  std::vector<bool> allowedge_;
  std::vector<int> queue_;
};

void check_input(const MatchGraph& graph) {
  if (graph.size() % 2 != 0) throw std::invalid_argument("perfect matching needs an even vertex count");
  for (int u = 0; u < graph.size(); ++u) {
    for (int v = 0; v < graph.size(); ++v) {
      if (u != v && std::isnan(graph.weight(u, v))) throw std::invalid_argument("NaN edge weight");
    }
  }
}

}  // namespace

std::optional<Matching> try_mwpm(const MatchGraph& graph) {
  check_input(graph);
  const int n = graph.size();
  Matching result;
  if (n == 0) return result;
  double max_w = 0.0;
  for (int u = 0; u < n; ++u) {
    for (int v = u + 1; v < n; ++v) {
      const double w = graph.weight(u, v);
      if (std::isfinite(w)) max_w = std::max(max_w, w);
      if (w < 0.0) throw std::invalid_argument("negative edge weight");
    }
  }
  // Maximum-cardinality maximum-weight matching on (C - w) is a minimum-weight
  // perfect matching on w whenever a perfect matching exists.
  const double offset = max_w + 1.0;
  std::vector<BlossomSolver::Edge> edges;
  edges.reserve(static_cast<std::size_t>(n * (n - 1) / 2));
  for (int u = 0; u < n; ++u) {
    for (int v = u + 1; v < n; ++v) {
      const double w = graph.weight(u, v);
      if (std::isfinite(w)) edges.push_back({u, v, offset - w});
    }
  }
  BlossomSolver solver(n, std::move(edges));
  const auto mate = solver.solve();
  for (int u = 0; u < n; ++u) {
    const int v = mate[static_cast<std::size_t>(u)];
    if (v < 0) return std::nullopt;
    if (u < v) result.pairs.emplace_back(u, v);
  }
  result.canonicalize();
  return result;
}

Matching mwpm(const MatchGraph& graph) {
  auto m = try_mwpm(graph);
  if (!m) throw std::runtime_error("graph admits no perfect matching");
  return *std::move(m);
}

Matching brute_force_mwpm(const MatchGraph& graph) {
  check_input(graph);
  const int n = graph.size();
  if (n > kBruteForceMaxVertices) throw std::invalid_argument("brute force limited to 14 vertices");
  std::vector<int> mate(static_cast<std::size_t>(n), -1);
  std::vector<std::pair<int, int>> current, best;
  double best_total = std::numeric_limits<double>::infinity();
  bool found = false;

  // Pairs are generated lowest-free-vertex first with ascending partners, so
  // the first minimum found is lexicographically smallest.
  std::function<void()> recurse = [&]() {
    int i = 0;
    while (i < n && mate[static_cast<std::size_t>(i)] != -1) ++i;
    if (i == n) {
      double total = 0.0;
      for (auto [u, v] : current) total += graph.weight(u, v);
      if (!found || total < best_total) {
        best_total = total;
        best = current;
        found = true;
      }
      return;
    }
    for (int j = i + 1; j < n; ++j) {
      if (mate[static_cast<std::size_t>(j)] != -1 || !std::isfinite(graph.weight(i, j))) continue;
      mate[static_cast<std::size_t>(i)] = j;
      mate[static_cast<std::size_t>(j)] = i;
      current.emplace_back(i, j);
      recurse();
      current.pop_back();
      mate[static_cast<std::size_t>(i)] = mate[static_cast<std::size_t>(j)] = -1;
    }
  };
  recurse();
  if (!found) throw std::runtime_error("graph admits no perfect matching");
  return Matching{best};
}

}  // namespace nmwpm
