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

#include "nmwpm/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "nmwpm/evaluator.hpp"
#include "nmwpm/parallel.hpp"
#include "nmwpm/rng.hpp"

namespace nmwpm {

Tensor loss(const Tensor& p, const Tensor& y, double lambda, LossParts* parts) {
  if (p.rows() != y.rows() || p.cols() != y.cols()) throw std::invalid_argument("loss: probabilities and labels differ in length");
  const auto floor = static_cast<Real>(kProbabilityFloor);
  const Tensor bce = binary_cross_entropy(p, y, floor);
  const Tensor ent = binary_cross_entropy(p, p, floor);
  const Tensor total = add(bce, scale(ent, static_cast<Real>(lambda)));
  if (parts) {
    parts->total = total.item();
    parts->bce = bce.item();
    parts->entropy = ent.item();
  }
  return total;
}

double cosine_lr(long step, long total_steps, double lr_init, double lr_min) {
  if (total_steps <= 0) return lr_init;
  const double t = std::clamp(static_cast<double>(step) / static_cast<double>(total_steps), 0.0, 1.0);
  return lr_min + 0.5 * (lr_init - lr_min) * (1.0 + std::cos(std::numbers::pi * t));
}

void adam_step(std::vector<Tensor>& params, AdamState& s, double lr) {
  if (s.m.size() != params.size()) {
    s.m.assign(params.size(), {});
    s.v.assign(params.size(), {});
    for (std::size_t i = 0; i < params.size(); ++i) {
      s.m[i].assign(params[i].size(), 0.0);
      s.v[i].assign(params[i].size(), 0.0);
    }
  }
  ++s.step;
  const double c1 = 1.0 - std::pow(s.beta1, static_cast<double>(s.step));
  const double c2 = 1.0 - std::pow(s.beta2, static_cast<double>(s.step));
  for (std::size_t i = 0; i < params.size(); ++i) {
    if (!params[i].has_grad()) continue;
    auto& val = params[i].values();
    const auto& g = params[i].impl()->grad;
    auto& m = s.m[i];
    auto& v = s.v[i];
    for (std::size_t j = 0; j < val.size(); ++j) {
      const double gj = g[j];
      m[j] = s.beta1 * m[j] + (1.0 - s.beta1) * gj;
      v[j] = s.beta2 * v[j] + (1.0 - s.beta2) * gj * gj;
      const double mh = m[j] / c1, vh = v[j] / c2;
      val[j] = static_cast<Real>(val[j] - lr * mh / (std::sqrt(vh) + s.eps));
    }
  }
}

std::pair<double, double> default_p_range(NoiseKind noise) {
  return noise == NoiseKind::Depolarizing ? std::pair{0.05, 0.17} : std::pair{0.03, 0.12};
}

void TrainConfig::validate() const {
  model.validate();
  if (batch_size < 1 || batches_per_epoch < 1 || epochs < 1) throw std::invalid_argument("batch and epoch counts must be >= 1");
  if (!(lr_min <= lr_init) || lr_min < 0) throw std::invalid_argument("need 0 <= lr_min <= lr_init");
  if (lambda < 0) throw std::invalid_argument("lambda must be >= 0");
  if (!(0 <= p_lo && p_lo <= p_hi && p_hi <= 1)) throw std::invalid_argument("p range must satisfy 0 <= p_lo <= p_hi <= 1");
  if (hist_bins < 2) throw std::invalid_argument("hist_bins must be >= 2");
  if (threads < 1) throw std::invalid_argument("threads must be >= 1");
}

SampledShot sample_shot(const CodeLattice& lattice, NoiseKind noise, double p_lo, double p_hi, std::uint64_t seed,
                        Substream stream, std::uint64_t index) {
  SplitMix64 rng(derive_seed(seed, stream, index));
  SampledShot s;
  s.p = p_lo + (p_hi - p_lo) * rng.uniform();
  s.frame = sample_error({noise, s.p}, lattice, rng());
  return s;
}

LabeledBatch make_labeled_batch(const CodeLattice& lattice, const PathRouter& router, NoiseKind noise, double p_lo,
                                double p_hi, std::uint64_t seed, Substream stream, std::uint64_t first_index, int shots,
                                const GroundTruthOptions& gt, int threads) {
  struct Slot {
    GroundTruthStatus status = GroundTruthStatus::Labeled;
    DecodingGraph graph;
    std::vector<std::uint8_t> labels;
  };
  std::vector<Slot> slots(static_cast<std::size_t>(shots));
  parallel_for(shots, threads, [&](int i) {
    const auto frame = sample_shot(lattice, noise, p_lo, p_hi, seed, stream, first_index + static_cast<std::uint64_t>(i)).frame;
    auto& slot = slots[static_cast<std::size_t>(i)];
    const auto r = label_shot(frame, router, gt);
    slot.status = r.status;
    if (r.status != GroundTruthStatus::Labeled) return;
    slot.graph = build_graph(extract_syndrome(frame, lattice), lattice, noise);
    slot.labels = edge_labels(slot.graph, r.matching);
  });
  LabeledBatch b;
  for (auto& s : slots) {
    if (s.status == GroundTruthStatus::Timeout) {
      ++b.timeouts;
    } else if (s.status == GroundTruthStatus::Infeasible) {
      ++b.infeasible;
    } else {
      b.graphs.push_back(std::move(s.graph));
      b.labels.push_back(std::move(s.labels));
    }
  }
  return b;
}

Tensor batch_loss(const LabeledBatch& batch, const QwpParams& params, double lambda, LossParts* parts,
                  Tensor* probabilities) {
  std::vector<const DecodingGraph*> graphs;
  std::vector<Real> y;
  for (std::size_t i = 0; i < batch.graphs.size(); ++i) {
    if (batch.graphs[i].edges.empty()) continue;
    graphs.push_back(&batch.graphs[i]);
    y.insert(y.end(), batch.labels[i].begin(), batch.labels[i].end());
  }
  if (graphs.empty()) {
    if (parts) *parts = {};
    if (probabilities) *probabilities = Tensor::zeros(0, 1);
    return Tensor();
  }
  const auto gb = make_batch(graphs, params);
  const Tensor p = predict_edges(gb, params);
  if (probabilities) *probabilities = p;
  const int n = static_cast<int>(y.size());
  return loss(p, Tensor::from(n, 1, std::move(y)), lambda, parts);
}

TrainResult train(const TrainConfig& config, const EpochCallback& on_epoch) {
  config.validate();
  const auto lattice = build_lattice(config.code, config.distance);
  const PathRouter router(lattice);
  TrainResult result{QwpParams(config.model, lattice, config.seed), {}};
  auto& params = result.params;
  auto tensors = params.tensors();
  AdamState adam;
  const long total_steps = static_cast<long>(config.epochs) * config.batches_per_epoch;
  long step = 0;
  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    EpochMetrics em;
    em.epoch = epoch + 1;
    double loss_sum = 0.0, bce_sum = 0.0, ent_sum = 0.0;
    long loss_batches = 0, correct = 0, edges = 0;
    std::vector<double> probs;
    for (int b = 0; b < config.batches_per_epoch; ++b, ++step) {
      const double lr = cosine_lr(step, total_steps, config.lr_init, config.lr_min);
      em.lr = lr;
      const auto batch = make_labeled_batch(lattice, router, config.noise, config.p_lo, config.p_hi, config.seed,
                                            Substream::Data, static_cast<std::uint64_t>(step) * config.batch_size,
                                            config.batch_size, config.ground_truth, config.threads);
      em.gt_timeouts += batch.timeouts;
      em.gt_infeasible += batch.infeasible;
      params.zero_grad();
      LossParts parts;
      Tensor p;
      const Tensor l = batch_loss(batch, params, config.lambda, &parts, &p);
      if (!l.defined()) continue;
      backward(l);
      adam_step(tensors, adam, lr);
      loss_sum += parts.total;
      bce_sum += parts.bce;
      ent_sum += parts.entropy;
      ++loss_batches;
      std::size_t k = 0;
      for (std::size_t gi = 0; gi < batch.graphs.size(); ++gi) {
        for (auto label : batch.labels[gi]) {
          const double pk = p.values()[k++];
          probs.push_back(pk);
          correct += ((pk >= 0.5) == (label != 0)) ? 1 : 0;
          ++edges;
        }
      }
    }
    if (loss_batches > 0) {
      em.loss = loss_sum / static_cast<double>(loss_batches);
      em.bce = bce_sum / static_cast<double>(loss_batches);
      em.entropy = ent_sum / static_cast<double>(loss_batches);
    }
    em.edge_acc = edges > 0 ? static_cast<double>(correct) / static_cast<double>(edges) : 0.0;
    em.histogram = histogram_density(probs, config.hist_bins);
    result.metrics.push_back(em);
    if (on_epoch) on_epoch(em, params);
  }
  return result;
}

std::string metrics_csv_header() { return "epoch,loss,bce,entropy,edge_acc,gt_timeouts,lr,gt_infeasible\n"; }

std::string metrics_csv_row(const EpochMetrics& m) {
  return std::to_string(m.epoch) + "," + format_double(m.loss) + "," + format_double(m.bce) + "," +
         format_double(m.entropy) + "," + format_double(m.edge_acc) + "," + std::to_string(m.gt_timeouts) + "," +
         format_double(m.lr) + "," + std::to_string(m.gt_infeasible) + "\n";
}

std::string metrics_csv(const std::vector<EpochMetrics>& metrics) {
  std::string out = metrics_csv_header();
  for (const auto& m : metrics) out += metrics_csv_row(m);
  return out;
}

}  // namespace nmwpm
