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

#include <cmath>

#include "doctest.h"
#include "nmwpm/evaluator.hpp"
#include "nmwpm/rng.hpp"

using namespace nmwpm;

namespace {

std::vector<BenchResult> synthetic(const std::vector<int>& distances, const std::vector<double>& grid,
                                   const std::function<double(int, double)>& ler) {
  std::vector<BenchResult> out;
  for (int L : distances) {
    for (double p : grid) {
      BenchResult r;
      r.distance = L;
      r.p = p;
      r.ler = ler(L, p);
      out.push_back(r);
    }
  }
  return out;
}

class DropFirstDefect : public Decoder {
 public:
  explicit DropFirstDefect(const PathRouter& r) : inner_(r) {}
  std::string tag() const override { return "broken"; }
  SyndromeMatching decode(const Syndrome& s) const override {
    auto m = inner_.decode(s);
    for (auto& cls : m.classes) {
      if (!cls.empty()) {
        cls.erase(cls.begin());
        break;
      }
    }
    return m;
  }

 private:
  MwpmDecoder inner_;
};

}  // namespace

TEST_CASE("Wilson interval reference values") {
  const auto [lo, hi] = wilson_interval(5, 10);
  CHECK(lo == doctest::Approx(0.236593).epsilon(1e-5));
  CHECK(hi == doctest::Approx(0.763407).epsilon(1e-5));
  const auto [lo0, hi0] = wilson_interval(0, 10);
  CHECK(lo0 == 0.0);
  const double z2 = 1.959963984540054 * 1.959963984540054;
  CHECK(hi0 == doctest::Approx(z2 / (10 + z2)));
  const auto w1 = wilson_interval(100, 1000), w4 = wilson_interval(400, 4000);
  CHECK((w1.second - w1.first) / (w4.second - w4.first) == doctest::Approx(2.0).epsilon(0.01));
}

TEST_CASE("run_ler: p = 0, containment, pairing and thread invariance") {
  const auto lat = build_toric(4);
  const PathRouter router(lat);
  const MwpmDecoder dec(router);
  const auto zero = run_ler(dec, router, {NoiseKind::Independent, 0.0}, 500, 1);
  CHECK(zero.failures == 0);
  CHECK(zero.ler == 0.0);
  const auto a = run_ler(dec, router, {NoiseKind::Independent, 0.08}, 2000, 9, 1);
  const auto b = run_ler(dec, router, {NoiseKind::Independent, 0.08}, 2000, 9, 4);
  CHECK(a.failures == b.failures);
  CHECK(a.ci_lo <= a.ler);
  CHECK(a.ler <= a.ci_hi);
  CHECK(a.decoder == "mwpm_manhattan");
  CHECK(a.distance == 4);
  CHECK(a.shots == 2000);
  CHECK_THROWS_AS(run_ler(dec, router, {NoiseKind::Independent, 0.1}, 0, 1), std::invalid_argument);
}

TEST_CASE("LER grows with p") {
  const auto lat = build_toric(6);
  const PathRouter router(lat);
  const MwpmDecoder dec(router);
  const auto lo = run_ler(dec, router, {NoiseKind::Independent, 0.05}, 20000, 3);
  const auto hi = run_ler(dec, router, {NoiseKind::Independent, 0.10}, 20000, 3);
  CHECK(lo.ci_hi < hi.ci_lo);
}

TEST_CASE("invalid decoder output is reported") {
  const auto lat = build_toric(4);
  const PathRouter router(lat);
  const DropFirstDefect dec(router);
  CHECK_THROWS_AS(run_ler(dec, router, {NoiseKind::Independent, 0.1}, 200, 1), std::logic_error);
}

TEST_CASE("threshold of log-linear curves is found exactly") {
  const double pc = 0.1034;
  const auto res = synthetic({4, 6, 8}, {0.08, 0.09, 0.10, 0.11, 0.12}, [&](int L, double p) {
    return std::exp(-2.0 + 5.0 * L * (p - pc));
  });
  const auto est = estimate_threshold(res);
  REQUIRE(est.crossings.size() == 2);
  CHECK(est.mean == doctest::Approx(pc).epsilon(1e-9));
  CHECK(est.spread == doctest::Approx(0.0).epsilon(1e-9));
  CHECK_FALSE(est.degenerate());
}

TEST_CASE("threshold errors and degenerate curves") {
  const std::vector<double> grid{0.08, 0.09, 0.10, 0.11};
  CHECK_THROWS_AS(estimate_threshold(synthetic({6, 8}, grid, [](int L, double p) { return p / L; })), NoCrossing);
  CHECK_THROWS_AS(estimate_threshold(synthetic({6}, grid, [](int, double p) { return p; })), std::invalid_argument);
  CHECK_THROWS_AS(estimate_threshold(synthetic({6, 8}, {0.1, 0.2, 0.3}, [](int L, double p) { return p * L; })),
                  std::invalid_argument);
  const auto same = estimate_threshold(synthetic({6, 8}, grid, [](int, double p) { return p; }));
  CHECK(same.degenerate());
  CHECK(std::isnan(same.mean));
  // Zero-LER points are skipped, not interpolated through.
  auto res = synthetic({6, 8}, {0.01, 0.08, 0.09, 0.11, 0.12}, [](int L, double p) {
    return p < 0.05 ? 0.0 : std::exp(L * (p - 0.1));
  });
  CHECK(estimate_threshold(res).mean == doctest::Approx(0.1).epsilon(1e-9));
}

TEST_CASE("histogram density") {
  CHECK(histogram_density({}, 10).empty());
  CHECK(export_histogram({}, 10).empty());
  const auto d = histogram_density(std::vector<double>(50, 0.5), 10);
  for (int i = 0; i < 10; ++i) CHECK(d[static_cast<std::size_t>(i)] == (i == 5 ? 10.0 : 0.0));
  SplitMix64 rng(1);
  std::vector<double> u(200000);
  for (auto& v : u) v = rng.uniform();
  for (double v : histogram_density(u, 20)) CHECK(v == doctest::Approx(1.0).epsilon(0.03));
  const auto rows = export_histogram({0.0, 1.0}, 4);
  REQUIRE(rows.size() == 4);
  CHECK(rows[0].density == 2.0);
  CHECK(rows[3].density == 2.0);
  CHECK(rows[3].bin_hi == 1.0);
  CHECK_THROWS_AS(histogram_density({0.5}, 1), std::invalid_argument);
}

TEST_CASE("polarization") {
  CHECK(polarization({}) == 0.0);
  CHECK(polarization({0.05, 0.95, 0.5, 0.1}) == 0.5);
}

TEST_CASE("results CSV round trip and errors") {
  BenchResult r;
  r.decoder = "nmwpm";
  r.code = CodeKind::RotatedSurface;
  r.distance = 5;
  r.noise = NoiseKind::Depolarizing;
  r.p = 0.1;
  r.shots = 1000;
  r.failures = 37;
  r.ler = 0.037;
  std::tie(r.ci_lo, r.ci_hi) = wilson_interval(37, 1000);
  const auto text = results_csv({r, r});
  CHECK(text.rfind("decoder,code,L,noise,p,shots,failures,ler,ci_lo,ci_hi\n", 0) == 0);
  const auto back = parse_results_csv(text);
  REQUIRE(back.size() == 2);
  CHECK(back[0].decoder == "nmwpm");
  CHECK(back[0].code == CodeKind::RotatedSurface);
  CHECK(back[0].failures == 37);
  CHECK(back[0].ci_hi == doctest::Approx(r.ci_hi).epsilon(1e-9));
  CHECK(results_csv(back) == text);
  CHECK_THROWS_AS(parse_results_csv("a,b\n"), std::invalid_argument);
  try {
    parse_results_csv("decoder,code,L,noise,p,shots,failures,ler,ci_lo,ci_hi\nx,toric,4\n");
    FAIL("expected an error");
  } catch (const std::invalid_argument& e) {
    CHECK(std::string(e.what()).find("row 2") != std::string::npos);
  }
  CHECK(histogram_csv({{0.0, 0.5, 1.2}}) == "bin_lo,bin_hi,density\n0,0.5,1.2\n");
}

TEST_CASE("edge evaluation is reproducible") {
  const auto lat = build_toric(4);
  const PathRouter router(lat);
  QwpConfig c;
  c.d_hidden = 8;
  c.gnn_layers = 1;
  c.enc_layers = 1;
  c.heads = 2;
  const QwpParams P(c, lat, 1);
  const auto a = evaluate_edges(P, lat, router, NoiseKind::Independent, 0.05, 0.12, 300, 4);
  const auto b = evaluate_edges(P, lat, router, NoiseKind::Independent, 0.05, 0.12, 300, 4, {}, 2);
  CHECK(a.edges == b.edges);
  CHECK(a.correct == b.correct);
  CHECK(a.probabilities == b.probabilities);
  CHECK(a.edges == static_cast<long>(a.probabilities.size()));
  CHECK(a.accuracy() > 0);
}
