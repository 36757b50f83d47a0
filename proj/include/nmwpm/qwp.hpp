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

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "nmwpm/checkpoint.hpp"
#include "nmwpm/decoding_graph.hpp"
#include "nmwpm/lattice.hpp"
#include "nmwpm/tensor.hpp"

namespace nmwpm {

struct QwpConfig {
  int d_hidden = 128;
  int gnn_layers = 4;
  int heads = 4;
  int enc_layers = 2;

  int d_sub() const { return d_hidden / 4; }
  int d_edge() const { return d_hidden + d_hidden / 2; }           // e'_ij
  int d_token() const { return 2 * d_hidden + d_edge(); }          // u_ij
  void validate() const;  // throws std::invalid_argument
};

// Every learnable array, by name, in a fixed manifest order. Weight matrices
// are stored [out, in]; bias and layer-norm vectors are [1, n].
class QwpParams {
 public:
  QwpParams() = default;
  // Fresh parameters: weights uniform in +-1/sqrt(fan_in), embedding tables
  // normal(0, 0.02), biases 0, layer-norm gains 1.
  QwpParams(const QwpConfig& config, const CodeLattice& lattice, std::uint64_t seed);

  const QwpConfig& config() const noexcept { return config_; }
  CodeKind code_kind() const noexcept { return kind_; }
  int code_distance() const noexcept { return distance_; }
  int num_stabilizers() const noexcept { return num_stabilizers_; }

  Tensor& operator[](const std::string& name);
  const Tensor& operator[](const std::string& name) const;
  const std::vector<std::string>& names() const noexcept { return names_; }
  std::vector<Tensor> tensors() const;
  std::size_t num_values() const;

  // Expected shape of every manifest entry for this config and lattice.
  static std::vector<std::pair<std::string, std::vector<int>>> manifest(const QwpConfig& config, CodeKind kind,
                                                                         int distance, int num_stabilizers);

  void zero_grad();
  void set_requires_grad(bool on);

  Checkpoint to_checkpoint() const;
  // Throws std::invalid_argument when a shape differs from the manifest.
  static QwpParams from_checkpoint(const Checkpoint& ckpt);

 private:
  QwpConfig config_;
  CodeKind kind_ = CodeKind::Toric;
  int distance_ = 0;
  int num_stabilizers_ = 0;
  std::vector<std::string> names_;
  std::map<std::string, Tensor> tensors_;
};

// Model inputs for one or more graphs. Only node rows that can reach an edge
// are kept (defects and used virtual rows) unless all_rows is set; the rows
// are independent until the GNN, where messages stay within a class.
struct GraphBatch {
  int num_nodes = 0;
  std::vector<int> node_graph;   // graph index per batch node
  std::vector<int> node_row;     // node row inside its graph
  std::vector<int> embed_row;    // row of R (virtual rows share the last one)
  Tensor pos, tau, rho, pe;      // [n, 2], [n, 2], [n, 1], [n, kPeDim]
  Tensor modulated;              // [n, 1]
  AttentionPairs neighbours;     // dst, src batch nodes of one class, dst != src
  std::vector<int> edge_src, edge_dst, edge_dist;  // per edge token
  Tensor edge_geo;               // [E, 3]: dx, dy, tau_edge
  AttentionPairs edge_pairs;     // all token pairs within one graph
  std::vector<int> edge_offset;  // first token of each graph, plus a final total

  int num_edges() const { return static_cast<int>(edge_src.size()); }
};

GraphBatch make_batch(const std::vector<const DecodingGraph*>& graphs, const QwpParams& params,
                      bool all_rows = false);

// h(0): per node, feature MLPs, type projection, embedding row, modulation
// by s_hat, then linear 2d -> d and layer norm.
Tensor encode_nodes(const GraphBatch& batch, const QwpParams& params);

// Diagnostics captured from one GNN layer.
struct GnnTrace {
  Tensor message;  // m_i
  Tensor gate;     // beta_i
};

Tensor gnn_layer(const Tensor& h, const GraphBatch& batch, const QwpParams& params, int layer,
                 GnnTrace* trace = nullptr);

// Probability per directed edge token, [E, 1].
Tensor predict_edges(const GraphBatch& batch, const QwpParams& params);

// Convenience for one graph; empty edge set gives an empty vector.
std::vector<double> predict_edges(const DecodingGraph& graph, const QwpParams& params);

inline constexpr double kProbabilityFloor = 1e-7;

// -ln(clamp(max(p_ij, p_ji))) per directed edge index (the two directions
// of a pair get the same value).
std::vector<double> edge_weights(const DecodingGraph& graph, const std::vector<double>& probabilities);

}  // namespace nmwpm
