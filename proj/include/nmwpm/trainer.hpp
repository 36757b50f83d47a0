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
#include <functional>
#include <string>
#include <vector>

#include "nmwpm/ground_truth.hpp"
#include "nmwpm/noise.hpp"
#include "nmwpm/qwp.hpp"
#include "nmwpm/rng.hpp"

namespace nmwpm {

struct LossParts {
  double total = 0.0;
  double bce = 0.0;
  double entropy = 0.0;
};

// Mean BCE(p, y) + lambda * mean binary entropy of p (BCE of p with itself).
// p and y are [E, 1]; probabilities are clamped to [1e-7, 1 - 1e-7].
Tensor loss(const Tensor& p, const Tensor& y, double lambda, LossParts* parts = nullptr);

double cosine_lr(long step, long total_steps, double lr_init, double lr_min);

struct AdamState {
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  long step = 0;
  std::vector<std::vector<double>> m;
  std::vector<std::vector<double>> v;
};

// One bias-corrected Adam update of every tensor from its grad buffer.
void adam_step(std::vector<Tensor>& params, AdamState& state, double lr);

struct TrainConfig {
  CodeKind code = CodeKind::Toric;
  int distance = 4;
  NoiseKind noise = NoiseKind::Independent;
  QwpConfig model;
  int batch_size = 32;
  int batches_per_epoch = 500;
  int epochs = 200;
  double lr_init = 9e-5;
  double lr_min = 1e-5;
  double lambda = 0.01;
  double p_lo = 0.03;
  double p_hi = 0.12;
  std::uint64_t seed = 0;
  int threads = 1;
  int hist_bins = 20;
  GroundTruthOptions ground_truth;

  void validate() const;  // throws std::invalid_argument
};

// [0.05, 0.17] depolarizing, [0.03, 0.12] independent.
std::pair<double, double> default_p_range(NoiseKind noise);

struct EpochMetrics {
  int epoch = 0;
  double loss = 0.0;
  double bce = 0.0;
  double entropy = 0.0;
  double edge_acc = 0.0;
  long gt_timeouts = 0;
  long gt_infeasible = 0;
  double lr = 0.0;
  std::vector<double> histogram;  // density of training-edge probabilities
};

// Shot `index` of a stream: p uniform in [p_lo, p_hi], then an error drawn
// with the next seed from the same generator.
struct SampledShot {
  double p = 0.0;
  PauliFrame frame;
};
SampledShot sample_shot(const CodeLattice& lattice, NoiseKind noise, double p_lo, double p_hi, std::uint64_t seed,
                        Substream stream, std::uint64_t index);

// A batch of labeled shots ready for the model.
struct LabeledBatch {
  std::vector<DecodingGraph> graphs;
  std::vector<std::vector<std::uint8_t>> labels;
  long timeouts = 0;
  long infeasible = 0;
};

// Samples and labels `shots` shots; shot i uses derive_seed(seed, stream,
// first_index + i). Discarded shots are counted, not replaced.
LabeledBatch make_labeled_batch(const CodeLattice& lattice, const PathRouter& router, NoiseKind noise, double p_lo,
                                double p_hi, std::uint64_t seed, Substream stream, std::uint64_t first_index, int shots,
                                const GroundTruthOptions& gt, int threads);

// Forward + loss over a labeled batch (no optimizer step).
Tensor batch_loss(const LabeledBatch& batch, const QwpParams& params, double lambda, LossParts* parts = nullptr,
                  Tensor* probabilities = nullptr);

using EpochCallback = std::function<void(const EpochMetrics&, const QwpParams&)>;

struct TrainResult {
  QwpParams params;
  std::vector<EpochMetrics> metrics;
};

TrainResult train(const TrainConfig& config, const EpochCallback& on_epoch = {});

// epoch,loss,bce,entropy,edge_acc,gt_timeouts,lr,gt_infeasible
std::string metrics_csv_header();
std::string metrics_csv_row(const EpochMetrics& m);
std::string metrics_csv(const std::vector<EpochMetrics>& metrics);

}  // namespace nmwpm
