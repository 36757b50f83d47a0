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

#include "nmwpm/qwp.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "nmwpm/rng.hpp"

namespace nmwpm {

namespace {

enum class Init { Weight, Bias, Gain, Embedding };

struct Spec {
  std::string name;
  std::vector<int> shape;
  Init init;
};

std::vector<Spec> param_specs(const QwpConfig& c, CodeKind kind, int distance, int num_stabilizers) {
  const int d = c.d_hidden, ds = c.d_sub(), D = c.d_token(), dg = d / 2;
  std::vector<Spec> s;
  auto weight = [&](const std::string& n, int out, int in) { s.push_back({n, {out, in}, Init::Weight}); };
  auto bias = [&](const std::string& n, int width) { s.push_back({n, {1, width}, Init::Bias}); };
  auto norm = [&](const std::string& n, int width) {
    s.push_back({n + ".g", {1, width}, Init::Gain});
    s.push_back({n + ".b", {1, width}, Init::Bias});
  };
  for (const auto& [f, df] : std::vector<std::pair<std::string, int>>{{"p", 2}, {"rho", 1}, {"pe", kPeDim}}) {
    weight("node." + f + ".U1", d, df);
    bias("node." + f + ".b1", d);
    weight("node." + f + ".U2", ds, d);
    bias("node." + f + ".b2", ds);
  }
  weight("node.tau.U", ds, 2);
  bias("node.tau.b", ds);
  s.push_back({"node.R", {num_stabilizers + (kind == CodeKind::RotatedSurface ? 1 : 0), d}, Init::Embedding});
  weight("node.proj.W", d, 2 * d);
  bias("node.proj.b", d);
  norm("node.norm", d);
  for (int l = 0; l < c.gnn_layers; ++l) {
    const std::string p = "gnn." + std::to_string(l) + ".";
    norm(p + "norm1", d);
    weight(p + "W1", d, d);
    bias(p + "b1", d);
    for (int k = 0; k < c.heads; ++k) {
      const std::string h = p + "head" + std::to_string(k) + ".";
      for (const char* m : {"2", "3", "4"}) {
        weight(h + "W" + m, d, d);
        bias(h + "b" + m, d);
      }
    }
    weight(p + "w5", 1, 3 * d);
    norm(p + "norm2", d);
    weight(p + "W6", 4 * d, d);
    bias(p + "b6", 4 * d);
    weight(p + "W7", d, 4 * d);
    bias(p + "b7", d);
  }
  s.push_back({"edge.dist", {distance_table_size(kind, distance), d}, Init::Embedding});
  weight("edge.geo.W1", dg, 3);
  bias("edge.geo.b1", dg);
  weight("edge.geo.W2", dg, dg);
  bias("edge.geo.b2", dg);
  norm("edge.geo.norm", dg);
  norm("enc.in_norm", D);
  for (int l = 0; l < c.enc_layers; ++l) {
    const std::string p = "enc." + std::to_string(l) + ".";
    norm(p + "norm1", D);
    for (const char* m : {"q", "k", "v", "o"}) {
      weight(p + "W" + m, D, D);
      bias(p + "b" + m, D);
    }
    norm(p + "norm2", D);
    weight(p + "W1", 4 * D, D);
    bias(p + "b1", 4 * D);
    weight(p + "W2", D, 4 * D);
    bias(p + "b2", D);
  }
  norm("enc.out_norm", D);
  weight("out.w", 1, D);
  bias("out.b", 1);
  return s;
}

Tensor mlp2(const Tensor& x, const QwpParams& P, const std::string& p) {
  return linear(relu(linear(x, P[p + ".U1"], P[p + ".b1"])), P[p + ".U2"], P[p + ".b2"]);
}

Tensor norm(const Tensor& x, const QwpParams& P, const std::string& p) {
  return layer_norm(x, P[p + ".g"], P[p + ".b"]);
}

}  // namespace

void QwpConfig::validate() const {
  if (d_hidden < 4 || d_hidden % 4 != 0) throw std::invalid_argument("d_hidden must be a positive multiple of 4");
  if (gnn_layers < 1 || enc_layers < 1 || heads < 1) throw std::invalid_argument("layer and head counts must be >= 1");
  if (d_token() % heads != 0) throw std::invalid_argument("encoder width 7*d_hidden/2 must be divisible by heads");
}

std::vector<std::pair<std::string, std::vector<int>>> QwpParams::manifest(const QwpConfig& config, CodeKind kind,
                                                                          int distance, int num_stabilizers) {
  std::vector<std::pair<std::string, std::vector<int>>> out;
  for (auto& s : param_specs(config, kind, distance, num_stabilizers)) out.emplace_back(s.name, s.shape);
  return out;
}

QwpParams::QwpParams(const QwpConfig& config, const CodeLattice& lattice, std::uint64_t seed)
    : config_(config), kind_(lattice.kind()), distance_(lattice.distance()),
      num_stabilizers_(lattice.num_stabilizers()) {
  config.validate();
  const auto specs = param_specs(config, kind_, distance_, num_stabilizers_);
  for (std::size_t i = 0; i < specs.size(); ++i) {
    const auto& s = specs[i];
    SplitMix64 rng(derive_seed(seed, Substream::Init, i));
    const int rows = s.shape[0], cols = s.shape[1];
    std::vector<Real> v(static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols), Real(0));
    switch (s.init) {
      case Init::Weight: {
        const double bound = 1.0 / std::sqrt(static_cast<double>(cols));
        for (auto& x : v) x = static_cast<Real>((2.0 * rng.uniform() - 1.0) * bound);
        break;
      }
      case Init::Embedding:
        for (auto& x : v) x = static_cast<Real>(0.02 * rng.normal());
        break;
      case Init::Gain:
        std::fill(v.begin(), v.end(), Real(1));
        break;
      case Init::Bias:
        break;
    }
    names_.push_back(s.name);
    tensors_.emplace(s.name, Tensor::from(rows, cols, std::move(v), true));
  }
}

Tensor& QwpParams::operator[](const std::string& name) {
  auto it = tensors_.find(name);
  if (it == tensors_.end()) throw std::out_of_range("no parameter named " + name);
  return it->second;
}

const Tensor& QwpParams::operator[](const std::string& name) const {
  auto it = tensors_.find(name);
  if (it == tensors_.end()) throw std::out_of_range("no parameter named " + name);
  return it->second;
}

std::vector<Tensor> QwpParams::tensors() const {
  std::vector<Tensor> out;
  for (const auto& n : names_) out.push_back(tensors_.at(n));
  return out;
}

std::size_t QwpParams::num_values() const {
  std::size_t n = 0;
  for (const auto& [_, t] : tensors_) n += t.size();
  return n;
}

void QwpParams::zero_grad() {
  for (auto& [_, t] : tensors_) t.zero_grad();
}

void QwpParams::set_requires_grad(bool on) {
  for (auto& [_, t] : tensors_) t.set_requires_grad(on);
}

Checkpoint QwpParams::to_checkpoint() const {
  Checkpoint ck;
  ck.meta["format"] = "qwp";
  ck.meta["code"] = std::string(to_string(kind_));
  ck.meta["distance"] = std::to_string(distance_);
  ck.meta["num_stabilizers"] = std::to_string(num_stabilizers_);
  ck.meta["d_hidden"] = std::to_string(config_.d_hidden);
  ck.meta["gnn_layers"] = std::to_string(config_.gnn_layers);
  ck.meta["heads"] = std::to_string(config_.heads);
  ck.meta["enc_layers"] = std::to_string(config_.enc_layers);
  for (const auto& n : names_) {
    const auto& t = tensors_.at(n);
    ck.entries.push_back({n,
                          {static_cast<std::uint64_t>(t.rows()), static_cast<std::uint64_t>(t.cols())},
                          std::vector<float>(t.values().begin(), t.values().end())});
  }
  return ck;
}

QwpParams QwpParams::from_checkpoint(const Checkpoint& ck) {
  auto meta = [&](const char* key) {
    auto it = ck.meta.find(key);
    if (it == ck.meta.end()) throw std::invalid_argument(std::string("checkpoint lacks metadata key ") + key);
    return it->second;
  };
  if (meta("format") != "qwp") throw std::invalid_argument("checkpoint does not hold QWP parameters");
  QwpParams p;
  p.config_.d_hidden = std::stoi(meta("d_hidden"));
  p.config_.gnn_layers = std::stoi(meta("gnn_layers"));
  p.config_.heads = std::stoi(meta("heads"));
  p.config_.enc_layers = std::stoi(meta("enc_layers"));
  p.config_.validate();
  p.kind_ = parse_code_kind(meta("code"));
  p.distance_ = std::stoi(meta("distance"));
  p.num_stabilizers_ = std::stoi(meta("num_stabilizers"));
  const auto specs = param_specs(p.config_, p.kind_, p.distance_, p.num_stabilizers_);
  if (specs.size() != ck.entries.size()) throw std::invalid_argument("checkpoint entry count does not match the manifest");
  for (std::size_t i = 0; i < specs.size(); ++i) {
    const auto& s = specs[i];
    const auto& e = ck.entries[i];
    if (e.name != s.name) throw std::invalid_argument("checkpoint entry " + e.name + " where " + s.name + " was expected");
    if (e.shape.size() != 2 || e.shape[0] != static_cast<std::uint64_t>(s.shape[0]) ||
        e.shape[1] != static_cast<std::uint64_t>(s.shape[1])) {
      throw std::invalid_argument("checkpoint entry " + e.name + " has the wrong shape");
    }
    p.names_.push_back(s.name);
    p.tensors_.emplace(s.name, Tensor::from(s.shape[0], s.shape[1], std::vector<Real>(e.data.begin(), e.data.end()), true));
  }
  return p;
}

GraphBatch make_batch(const std::vector<const DecodingGraph*>& graphs, const QwpParams& params, bool all_rows) {
  GraphBatch b;
  std::vector<Real> pos, tau, rh, pe, mod, geo;
  std::vector<std::pair<int, int>> neighbour_pairs;
  for (std::size_t gi = 0; gi < graphs.size(); ++gi) {
    const auto& g = *graphs[gi];
    if (g.num_stabilizers != params.num_stabilizers() || g.kind != params.code_kind() ||
        g.distance != params.code_distance()) {
      throw std::invalid_argument("graph lattice does not match the parameters");
    }
    std::vector<int> rows;
    if (all_rows) {
      for (int r = 0; r < g.num_nodes; ++r) rows.push_back(r);
    } else {
      for (const auto& cn : g.class_nodes) rows.insert(rows.end(), cn.begin(), cn.end());
      std::sort(rows.begin(), rows.end());
    }
    std::vector<int> local(static_cast<std::size_t>(g.num_nodes), -1);
    for (int r : rows) {
      local[static_cast<std::size_t>(r)] = b.num_nodes++;
      b.node_graph.push_back(static_cast<int>(gi));
      b.node_row.push_back(r);
      b.embed_row.push_back(std::min(r, g.num_stabilizers));
      const float* f = g.features(r);
      pos.insert(pos.end(), {f[0], f[1]});
      tau.insert(tau.end(), {f[2], f[3]});
      rh.push_back(f[4]);
      pe.insert(pe.end(), f + 5, f + 5 + kPeDim);
      mod.push_back(g.modulated[static_cast<std::size_t>(r)]);
    }
    for (const auto& cn : g.class_nodes) {
      for (int dst : cn) {
        for (int src : cn) {
          if (src != dst) neighbour_pairs.emplace_back(local[static_cast<std::size_t>(dst)], local[static_cast<std::size_t>(src)]);
        }
      }
    }
    const int first = b.num_edges();
    b.edge_offset.push_back(first);
    const int table = distance_table_size(g.kind, g.distance);
    for (const auto& e : g.edges) {
      b.edge_src.push_back(local[static_cast<std::size_t>(e.src)]);
      b.edge_dst.push_back(local[static_cast<std::size_t>(e.dst)]);
      b.edge_dist.push_back(std::min(e.dist, table - 1));
      geo.insert(geo.end(), {static_cast<Real>(e.dx), static_cast<Real>(e.dy), static_cast<Real>(e.cls)});
    }
    const int last = b.num_edges();
    for (int t1 = first; t1 < last; ++t1) {
      for (int t2 = first; t2 < last; ++t2) {
        b.edge_pairs.dst.push_back(t1);
        b.edge_pairs.src.push_back(t2);
      }
    }
  }
  b.edge_offset.push_back(b.num_edges());
  std::sort(neighbour_pairs.begin(), neighbour_pairs.end());
  for (auto [d, s] : neighbour_pairs) {
    b.neighbours.dst.push_back(d);
    b.neighbours.src.push_back(s);
  }
  const int n = b.num_nodes, E = b.num_edges();
  b.pos = Tensor::from(n, 2, std::move(pos));
  b.tau = Tensor::from(n, 2, std::move(tau));
  b.rho = Tensor::from(n, 1, std::move(rh));
  b.pe = Tensor::from(n, kPeDim, std::move(pe));
  b.modulated = Tensor::from(n, 1, std::move(mod));
  b.edge_geo = Tensor::from(E, 3, std::move(geo));
  return b;
}

Tensor encode_nodes(const GraphBatch& b, const QwpParams& P) {
  const Tensor a = concat({mlp2(b.pos, P, "node.p"), linear(b.tau, P["node.tau.U"], P["node.tau.b"]),
                           mlp2(b.rho, P, "node.rho"), mlp2(b.pe, P, "node.pe"), gather_rows(P["node.R"], b.embed_row)},
                          1);
  return norm(linear(mul(a, b.modulated), P["node.proj.W"], P["node.proj.b"]), P, "node.norm");
}

Tensor gnn_layer(const Tensor& h, const GraphBatch& b, const QwpParams& P, int layer, GnnTrace* trace) {
  const auto& cfg = P.config();
  const int d = cfg.d_hidden;
  const std::string p = "gnn." + std::to_string(layer) + ".";
  const Tensor hn = norm(h, P, p + "norm1");
  const Tensor self = linear(hn, P[p + "W1"], P[p + "b1"]);
  auto stacked = [&](const char* m) {
    std::vector<Tensor> w, bias;
    for (int k = 0; k < cfg.heads; ++k) {
      const std::string hk = p + "head" + std::to_string(k) + ".";
      w.push_back(P[hk + "W" + m]);
      bias.push_back(P[hk + "b" + m]);
    }
    return linear(hn, concat(w, 0), concat(bias, 1));
  };
  const Tensor msg = segment_attention(stacked("3"), stacked("4"), stacked("2"), b.neighbours, b.num_nodes, cfg.heads,
                                       static_cast<Real>(1.0 / std::sqrt(static_cast<double>(d))), true);
  const Tensor gate = sigmoid(linear(concat({msg, self, sub(msg, self)}, 1), P[p + "w5"]));
  const Tensor z = add(msg, mul(sub(self, msg), gate));
  const Tensor h1 = add(z, h);
  const Tensor ffn = linear(gelu(linear(norm(h1, P, p + "norm2"), P[p + "W6"], P[p + "b6"])), P[p + "W7"], P[p + "b7"]);
  if (trace) {
    trace->message = msg;
    trace->gate = gate;
  }
  return add(h1, ffn);
}

Tensor predict_edges(const GraphBatch& b, const QwpParams& P) {
  const auto& cfg = P.config();
  const int E = b.num_edges();
  if (E == 0) return Tensor::zeros(0, 1);
  Tensor h = encode_nodes(b, P);
  for (int l = 0; l < cfg.gnn_layers; ++l) h = gnn_layer(h, b, P, l);

  const Tensor geo = norm(linear(relu(linear(b.edge_geo, P["edge.geo.W1"], P["edge.geo.b1"])), P["edge.geo.W2"],
                                 P["edge.geo.b2"]),
                          P, "edge.geo.norm");
  const Tensor u = concat({gather_rows(h, b.edge_src), gather_rows(h, b.edge_dst), gather_rows(P["edge.dist"], b.edge_dist), geo}, 1);
  Tensor x = norm(u, P, "enc.in_norm");
  const int D = cfg.d_token();
  const auto scale_factor = static_cast<Real>(1.0 / std::sqrt(static_cast<double>(D / cfg.heads)));
  for (int l = 0; l < cfg.enc_layers; ++l) {
    const std::string p = "enc." + std::to_string(l) + ".";
    const Tensor y = norm(x, P, p + "norm1");
    const Tensor att = segment_attention(linear(y, P[p + "Wq"], P[p + "bq"]), linear(y, P[p + "Wk"], P[p + "bk"]),
                                         linear(y, P[p + "Wv"], P[p + "bv"]), b.edge_pairs, E, cfg.heads, scale_factor,
                                         false);
    x = add(x, linear(att, P[p + "Wo"], P[p + "bo"]));
    x = add(x, linear(gelu(linear(norm(x, P, p + "norm2"), P[p + "W1"], P[p + "b1"])), P[p + "W2"], P[p + "b2"]));
  }
  x = norm(x, P, "enc.out_norm");
  return sigmoid(linear(x, P["out.w"], P["out.b"]));
}

std::vector<double> predict_edges(const DecodingGraph& graph, const QwpParams& params) {
  NoGradGuard no_grad;
  const auto batch = make_batch({&graph}, params);
  const Tensor p = predict_edges(batch, params);
  return std::vector<double>(p.values().begin(), p.values().end());
}

std::vector<double> edge_weights(const DecodingGraph& graph, const std::vector<double>& probabilities) {
  if (probabilities.size() != graph.edges.size()) throw std::invalid_argument("one probability per directed edge expected");
  std::vector<double> w(probabilities.size());
  for (std::size_t i = 0; i < w.size(); ++i) {
    const double p = std::max(probabilities[i], probabilities[static_cast<std::size_t>(graph.edges[i].reverse)]);
    w[i] = -std::log(std::clamp(p, kProbabilityFloor, 1.0 - kProbabilityFloor));
  }
  return w;
}

}  // namespace nmwpm
