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

#include <functional>
#include <string>
#include <vector>

#include "nmwpm/decoding_graph.hpp"
#include "nmwpm/qwp.hpp"
#include "nmwpm/routing.hpp"

namespace nmwpm {

// MWPM over the defects of one class. pair(i, j) weighs defects i and j by
// position in `defects`. With a boundary weight function (rotated code) each
// defect also gets a private boundary copy; copies pair freely at weight 0,
// so any subset of defects may end on the boundary.
std::vector<MatchedPair> match_class(const std::vector<int>& defects, const std::function<double(int, int)>& pair,
                                     const std::function<double(int)>& boundary = {});

// Decoding after the network: merge directions, take -ln, run MWPM per class.
SyndromeMatching decode_with_probabilities(const DecodingGraph& graph, const std::vector<double>& probabilities);

// Full neural pipeline for one syndrome.
SyndromeMatching decode(const Syndrome& syndrome, const CodeLattice& lattice, const QwpParams& params,
                        NoiseKind noise = NoiseKind::Independent);

class Decoder {
 public:
  virtual ~Decoder() = default;
  virtual std::string tag() const = 0;
  virtual SyndromeMatching decode(const Syndrome& syndrome) const = 0;
};

// Baseline: weights are correction path lengths (wrapped Manhattan on the
// torus, nearest-boundary distance for boundary matches).
class MwpmDecoder : public Decoder {
 public:
  explicit MwpmDecoder(const PathRouter& router) : router_(router) {}
  std::string tag() const override { return "mwpm_manhattan"; }
  SyndromeMatching decode(const Syndrome& syndrome) const override;

 private:
  const PathRouter& router_;
};

class NeuralDecoder : public Decoder {
 public:
  NeuralDecoder(const QwpParams& params, const CodeLattice& lattice, NoiseKind noise)
      : params_(params), lattice_(lattice), noise_(noise) {}
  std::string tag() const override { return "nmwpm"; }
  SyndromeMatching decode(const Syndrome& syndrome) const override {
    return nmwpm::decode(syndrome, lattice_, params_, noise_);
  }

 private:
  const QwpParams& params_;
  const CodeLattice& lattice_;
  NoiseKind noise_;
};

}  // namespace nmwpm
