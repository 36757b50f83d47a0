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
#include <string>
#include <vector>

#include "nmwpm/decoder.hpp"
#include "nmwpm/ground_truth.hpp"
#include "nmwpm/noise.hpp"
#include "nmwpm/rng.hpp"

namespace nmwpm {

struct BenchResult {
  std::string decoder;
  CodeKind code = CodeKind::Toric;
  int distance = 0;
  NoiseKind noise = NoiseKind::Independent;
  double p = 0.0;
  long shots = 0;
  long failures = 0;
  double ler = 0.0;
  double ci_lo = 0.0;
  double ci_hi = 0.0;
};

// 95% Wilson score interval for k successes in n trials.
std::pair<double, double> wilson_interval(long k, long n, double z = 1.959963984540054);

// Monte-Carlo logical error rate. Shot i samples its error from
// derive_seed(seed, Shots, i), so two decoders given the same seed see the
// same shots. Throws std::logic_error if a decoder leaves a defect unmatched
// or its correction leaves a nonzero syndrome.
BenchResult run_ler(const Decoder& decoder, const PathRouter& router, const NoiseModel& noise, long shots,
                    std::uint64_t seed, int threads = 1);

class NoCrossing : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Crossing {
  int distance_small = 0;
  int distance_large = 0;
  double p = 0.0;
  bool degenerate = false;  // curves coincide on every shared point
};

struct ThresholdEstimate {
  double mean = 0.0;    // over non-degenerate crossings (NaN if none)
  double spread = 0.0;  // max - min over non-degenerate crossings
  std::vector<Crossing> crossings;
  bool degenerate() const;
};

// Crossing of adjacent-distance LER curves, interpolating ln(LER) linearly in
// p between the bracketing grid points. Needs >= 2 distances sharing >= 4
// p points; throws std::invalid_argument otherwise and NoCrossing when some
// pair of curves does not cross inside the grid.
ThresholdEstimate estimate_threshold(const std::vector<BenchResult>& results);

// Density per bin over [0, 1] (integrates to 1); empty input gives an empty
// vector. Values are clamped into [0, 1]; 1 falls in the last bin.
std::vector<double> histogram_density(const std::vector<double>& values, int bins);

struct HistogramRow {
  double bin_lo = 0.0;
  double bin_hi = 0.0;
  double density = 0.0;
};
std::vector<HistogramRow> export_histogram(const std::vector<double>& probabilities, int bins);

// Fraction of values in [0, 0.1) or (0.9, 1].
double polarization(const std::vector<double>& probabilities);

struct EdgeEvaluation {
  long shots = 0;
  long discarded = 0;
  long edges = 0;
  long correct = 0;
  double accuracy() const { return edges ? static_cast<double>(correct) / static_cast<double>(edges) : 0.0; }
  std::vector<double> probabilities;
};

// Directed-edge classification against ground-truth labels on fresh shots
// (Holdout substream), threshold 0.5.
EdgeEvaluation evaluate_edges(const QwpParams& params, const CodeLattice& lattice, const PathRouter& router,
                              NoiseKind noise, double p_lo, double p_hi, long shots, std::uint64_t seed,
                              const GroundTruthOptions& gt = {}, int threads = 1);

std::string results_csv(const std::vector<BenchResult>& results);
std::vector<BenchResult> parse_results_csv(const std::string& text);
std::string histogram_csv(const std::vector<HistogramRow>& rows);
std::string format_double(double v);

}  // namespace nmwpm
