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
#include <stdexcept>
#include <vector>

#include "nmwpm/blossom.hpp"
#include "nmwpm/lattice.hpp"
#include "nmwpm/noise.hpp"
#include "nmwpm/routing.hpp"

namespace nmwpm {

// Errored qubits of one error type, connected through shared detecting
// stabilizers, and the stabilizers they leave with odd parity.
struct ErrorCluster {
  PauliType error_type = PauliType::X;
  int cls = 0;                 // matching class of the endpoints
  std::vector<int> qubits;     // sorted
  std::vector<int> endpoints;  // sorted stabilizer indices
};

// Clusters for both error types: X errors first, then Z. Within a type,
// clusters are ordered by their smallest qubit.
std::vector<ErrorCluster> cluster_errors(const PauliFrame& frame, const CodeLattice& lattice);

struct GroundTruthOptions {
  double brute_force_budget_ms = 100.0;  // wall clock per shot for the last stage
  int max_candidates = 50;               // k-best matchings per cluster
  int max_brute_force_defects = 24;      // hard cap on the exhaustive stage
};

enum class GroundTruthStatus : std::uint8_t {
  Labeled = 0,
  Timeout = 1,     // exhaustive stage ran past its budget
  Infeasible = 2,  // no matching with shortest-path corrections is logically valid
};

struct GroundTruthResult {
  GroundTruthStatus status = GroundTruthStatus::Labeled;
  SyndromeMatching matching;
  int stage = 0;  // highest stage used: 0 none needed, 1 MWPM, 2 k-best permutation, 3 exhaustive
};

class GroundTruthTimeout : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class GroundTruthInfeasible : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Label a shot per class: MWPM on the error clusters (or, for the rotated
// code, over the syndrome with a growing number of boundary virtuals), then
// cheapest-first alternative matchings within clusters, then an exhaustive
// search under a wall-clock budget. Never throws for timeouts; see status.
GroundTruthResult label_shot(const PauliFrame& frame, const PathRouter& router,
                             const GroundTruthOptions& options = {});

// As label_shot(), but throws GroundTruthTimeout / GroundTruthInfeasible.
SyndromeMatching ground_truth_matching(const PauliFrame& frame, const PathRouter& router,
                                       const GroundTruthOptions& options = {});

// Rotated code, one class: MWPM over the class defects plus v virtual
// boundary nodes (virtual-virtual weight 0, defect-virtual weight = distance
// to the nearest boundary), for v = parity, parity + 2, ... up to the defect
// count. Returns the first matching whose correction is logically valid for
// `frame`; throws GroundTruthInfeasible if none is.
std::vector<MatchedPair> rotated_virtual_matching(const Syndrome& syndrome, const PauliFrame& frame, int cls,
                                                  const PathRouter& router);

// True iff the matching's correction leaves zero syndrome and no logical error.
bool is_valid_correction(const PauliFrame& frame, const SyndromeMatching& matching, const PathRouter& router);

// Route choice that brings the pair parities of one class to `target`,
// toggling only tied (equal-length) routes. Returns false if impossible.
bool fix_routes(std::vector<MatchedPair>& pairs, std::uint32_t target, const PathRouter& router);

// Up to `k` perfect matchings of `graph` in order of nondecreasing weight
// (Lawler's partitioning). Edges between two vertices in `interchangeable`
// are never branched on, so matchings that differ only there count once.
std::vector<Matching> k_best_matchings(const MatchGraph& graph, int k,
                                       const std::vector<std::uint8_t>& interchangeable = {});

}  // namespace nmwpm
