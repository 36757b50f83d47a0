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

// Built against the double-precision copy of the library.
#include <algorithm>
#include <cmath>

#include "doctest.h"
#include "nmwpm/rng.hpp"
#include "nmwpm/trainer.hpp"

using namespace nmwpm;

static_assert(sizeof(Real) == sizeof(double));

namespace {

QwpConfig small_config() {
  QwpConfig c;
  c.d_hidden = 8;
  c.gnn_layers = 2;
  c.heads = 2;
  c.enc_layers = 2;
  return c;
}

// A rotated-code shot with defects of both types and a label per edge.
LabeledBatch labeled_graph(const CodeLattice& lat, const std::vector<int>& defects) {
  Syndrome s;
  s.bits.assign(static_cast<std::size_t>(lat.num_stabilizers()), 0);
  for (int d : defects) s.bits[static_cast<std::size_t>(d)] = 1;
  LabeledBatch b;
  b.graphs.push_back(build_graph(s, lat, NoiseKind::Depolarizing));
  std::vector<std::uint8_t> y(b.graphs[0].edges.size(), 0);
  SplitMix64 rng(5);
  for (std::size_t i = 0; i < y.size(); ++i) {
    if (rng.uniform() < 0.3) y[i] = y[static_cast<std::size_t>(b.graphs[0].edges[i].reverse)] = 1;
  }
  b.labels.push_back(y);
  return b;
}

double loss_value(const LabeledBatch& b, const QwpParams& P) {
  NoGradGuard ng;
  return batch_loss(b, P, 0.01).item();
}

}  // namespace

TEST_CASE("end-to-end loss gradient matches central differences") {
  const auto lat = build_rotated(3);
  // Two X-type and one Z-type defect: both classes, both virtual rows.
  const auto xr = lat.type_range(PauliType::X), zr = lat.type_range(PauliType::Z);
  const auto b = labeled_graph(lat, {xr[0], xr[0] + 2, zr[0] + 1});
  REQUIRE(b.graphs[0].defects.size() == 3);
  QwpParams P(small_config(), lat, 21);
  // Perturb the zero-initialized biases and unit gains so every path is generic.
  SplitMix64 rng(99);
  for (const auto& n : P.names()) {
    for (auto& v : P[n].values()) v += 0.05 * (2 * rng.uniform() - 1);
  }
  P.zero_grad();
  backward(batch_loss(b, P, 0.01));

  // 20 coordinates spread over the manifest.
  const auto& names = P.names();
  double max_err = 0, max_fd = 0;
  for (int k = 0; k < 20; ++k) {
    const auto& name = names[static_cast<std::size_t>(k) * names.size() / 20];
    auto& t = P[name];
    const auto grad = t.grad();
    const std::size_t j = static_cast<std::size_t>(rng() % static_cast<std::uint64_t>(t.size()));
    const double h = 1e-5, v0 = t.values()[j];
    t.values()[j] = v0 + h;
    const double up = loss_value(b, P);
    t.values()[j] = v0 - h;
    const double down = loss_value(b, P);
    t.values()[j] = v0;
    const double fd = (up - down) / (2 * h);
    INFO(name << "[" << j << "] autodiff " << grad[j] << " fd " << fd);
    max_err = std::max(max_err, std::abs(grad[j] - fd));
    max_fd = std::max(max_fd, std::abs(fd));
    CHECK(std::abs(grad[j] - fd) <= 1e-3 * std::max(std::abs(fd), 1e-3));
  }
  CHECK(max_err / max_fd < 1e-3);
}

TEST_CASE("every manifest entry receives gradient") {
  const auto lat = build_rotated(5);
  QwpParams P(small_config(), lat, 3);
  LabeledBatch b;
  // Several defects of both types near the boundaries and the center.
  std::vector<int> defects;
  for (int i = 0; i < lat.num_stabilizers(); i += 3) defects.push_back(i);
  b = labeled_graph(lat, defects);
  P.zero_grad();
  backward(batch_loss(b, P, 0.01));
  for (const auto& n : P.names()) {
    double norm = 0;
    for (auto g : P[n].grad()) norm += g * g;
    INFO(n);
    CHECK(norm > 0);
  }
}

TEST_CASE("loss decomposes into BCE plus lambda times entropy") {
  const auto lat = build_rotated(3);
  const QwpParams P(small_config(), lat, 1);
  std::vector<int> defects{0, 2, 5};
  const auto b = labeled_graph(lat, defects);
  NoGradGuard ng;
  LossParts parts;
  const double l = batch_loss(b, P, 0.37, &parts).item();
  Tensor p;
  batch_loss(b, P, 0.0, nullptr, &p);
  const double bce = loss(p, p, 0.0).item();
  CHECK(parts.entropy == doctest::Approx(bce).epsilon(1e-12));
  CHECK(l == doctest::Approx(parts.bce + 0.37 * parts.entropy).epsilon(1e-12));
}
