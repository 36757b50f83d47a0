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

#include "nmwpm/evaluator.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <set>
#include <sstream>

#include "nmwpm/parallel.hpp"
#include "nmwpm/trainer.hpp"

namespace nmwpm {

std::pair<double, double> wilson_interval(long k, long n, double z) {
  if (n <= 0) return {0.0, 1.0};
  const double nn = static_cast<double>(n);
  const double phat = static_cast<double>(k) / nn;
  const double z2 = z * z;
  const double denom = 1.0 + z2 / nn;
  const double center = (phat + z2 / (2.0 * nn)) / denom;
  const double half = z * std::sqrt(phat * (1.0 - phat) / nn + z2 / (4.0 * nn * nn)) / denom;
  return {k == 0 ? 0.0 : std::max(0.0, center - half), k == n ? 1.0 : std::min(1.0, center + half)};
}

BenchResult run_ler(const Decoder& decoder, const PathRouter& router, const NoiseModel& noise, long shots,
                    std::uint64_t seed, int threads) {
  if (shots < 1) throw std::invalid_argument("shots must be >= 1");
  const auto& lat = router.lattice();
  std::vector<std::uint8_t> failed(static_cast<std::size_t>(shots), 0);
  parallel_for(static_cast<int>(shots), threads, [&](int i) {
    const auto frame = sample_error(noise, lat, derive_seed(seed, Substream::Shots, static_cast<std::uint64_t>(i)));
    const auto syndrome = extract_syndrome(frame, lat);
    const auto matching = decoder.decode(syndrome);
    std::vector<int> covered;
    for (const auto& cls : matching.classes) {
      for (const auto& p : cls) {
        covered.push_back(p.a);
        if (p.b != kBoundary) covered.push_back(p.b);
      }
    }
    std::sort(covered.begin(), covered.end());
    std::vector<int> defects;
    for (int s = 0; s < syndrome.size(); ++s) {
      if (syndrome.bits[static_cast<std::size_t>(s)]) defects.push_back(s);
    }
    if (covered != defects) throw std::logic_error(decoder.tag() + " returned a matching that does not cover every defect once");
    bool logical = false;
    try {
      logical = is_logical_error(frame, router.correction(matching), lat);
    } catch (const std::invalid_argument&) {
      throw std::logic_error(decoder.tag() + " produced a correction with a residual syndrome");
    }
    failed[static_cast<std::size_t>(i)] = logical ? 1 : 0;
  });
  BenchResult r;
  r.decoder = decoder.tag();
  r.code = lat.kind();
  r.distance = lat.distance();
  r.noise = noise.kind;
  r.p = noise.p;
  r.shots = shots;
  for (auto f : failed) r.failures += f;
  r.ler = static_cast<double>(r.failures) / static_cast<double>(shots);
  std::tie(r.ci_lo, r.ci_hi) = wilson_interval(r.failures, shots);
  return r;
}

bool ThresholdEstimate::degenerate() const {
  return std::any_of(crossings.begin(), crossings.end(), [](const Crossing& c) { return c.degenerate; });
}

ThresholdEstimate estimate_threshold(const std::vector<BenchResult>& results) {
  std::map<int, std::map<double, double>> curves;  // distance -> p -> ler
  for (const auto& r : results) curves[r.distance][r.p] = r.ler;
  if (curves.size() < 2) throw std::invalid_argument("threshold estimation needs at least two code distances");
  ThresholdEstimate est;
  std::vector<double> values;
  for (auto it = curves.begin(); std::next(it) != curves.end(); ++it) {
    const auto& small = it->second;
    const auto& large = std::next(it)->second;
    std::vector<std::pair<double, double>> diff;  // p, ln(ler_large) - ln(ler_small)
    std::size_t shared = 0;
    for (const auto& [p, ler_s] : small) {
      auto f = large.find(p);
      if (f == large.end()) continue;
      ++shared;
      if (ler_s > 0.0 && f->second > 0.0) diff.emplace_back(p, std::log(f->second) - std::log(ler_s));
    }
    if (shared < 4) throw std::invalid_argument("threshold estimation needs at least 4 shared p points per distance pair");
    Crossing c;
    c.distance_small = it->first;
    c.distance_large = std::next(it)->first;
    if (!diff.empty() && std::all_of(diff.begin(), diff.end(), [](const auto& d) { return d.second == 0.0; })) {
      c.degenerate = true;
      c.p = std::numeric_limits<double>::quiet_NaN();
      est.crossings.push_back(c);
      continue;
    }
    bool found = false;
    for (std::size_t i = 0; i + 1 < diff.size() && !found; ++i) {
      const auto [p1, d1] = diff[i];
      const auto [p2, d2] = diff[i + 1];
      if (d1 == 0.0) {
        c.p = p1;
        found = true;
      } else if ((d1 < 0.0) != (d2 < 0.0) || d2 == 0.0) {
        c.p = p1 + (p2 - p1) * (-d1) / (d2 - d1);
        found = true;
      }
    }
    if (!found) {
      throw NoCrossing("LER curves for L=" + std::to_string(c.distance_small) + " and L=" +
                       std::to_string(c.distance_large) + " do not cross inside the p grid");
    }
    est.crossings.push_back(c);
    values.push_back(c.p);
  }
  if (values.empty()) {
    est.mean = std::numeric_limits<double>::quiet_NaN();
    est.spread = std::numeric_limits<double>::quiet_NaN();
  } else {
    double s = 0.0;
    for (double v : values) s += v;
    est.mean = s / static_cast<double>(values.size());
    const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
    est.spread = *hi - *lo;
  }
  return est;
}

std::vector<double> histogram_density(const std::vector<double>& values, int bins) {
  if (bins < 2) throw std::invalid_argument("histogram needs at least 2 bins");
  if (values.empty()) return {};
  std::vector<double> counts(static_cast<std::size_t>(bins), 0.0);
  for (double v : values) {
    const double c = std::clamp(v, 0.0, 1.0);
    const int b = std::min(bins - 1, static_cast<int>(c * bins));
    counts[static_cast<std::size_t>(b)] += 1.0;
  }
  for (auto& c : counts) c *= static_cast<double>(bins) / static_cast<double>(values.size());
  return counts;
}

std::vector<HistogramRow> export_histogram(const std::vector<double>& probabilities, int bins) {
  const auto d = histogram_density(probabilities, bins);
  std::vector<HistogramRow> rows;
  for (std::size_t i = 0; i < d.size(); ++i) {
    rows.push_back({static_cast<double>(i) / bins, static_cast<double>(i + 1) / bins, d[i]});
  }
  return rows;
}

double polarization(const std::vector<double>& probabilities) {
  if (probabilities.empty()) return 0.0;
  long n = 0;
  for (double p : probabilities) n += (p < 0.1 || p > 0.9) ? 1 : 0;
  return static_cast<double>(n) / static_cast<double>(probabilities.size());
}

EdgeEvaluation evaluate_edges(const QwpParams& params, const CodeLattice& lattice, const PathRouter& router,
                              NoiseKind noise, double p_lo, double p_hi, long shots, std::uint64_t seed,
                              const GroundTruthOptions& gt, int threads) {
  EdgeEvaluation ev;
  ev.shots = shots;
  constexpr long kChunk = 256;
  NoGradGuard no_grad;
  for (long first = 0; first < shots; first += kChunk) {
    const int n = static_cast<int>(std::min(kChunk, shots - first));
    const auto batch = make_labeled_batch(lattice, router, noise, p_lo, p_hi, seed, Substream::Holdout,
                                          static_cast<std::uint64_t>(first), n, gt, threads);
    ev.discarded += batch.timeouts + batch.infeasible;
    for (std::size_t i = 0; i < batch.graphs.size(); ++i) {
      const auto& g = batch.graphs[i];
      if (g.edges.empty()) continue;
      const auto p = predict_edges(g, params);
      for (std::size_t e = 0; e < p.size(); ++e) {
        ev.probabilities.push_back(p[e]);
        ev.correct += ((p[e] >= 0.5) == (batch.labels[i][e] != 0)) ? 1 : 0;
        ++ev.edges;
      }
    }
  }
  return ev;
}

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

std::string results_csv(const std::vector<BenchResult>& results) {
  std::string out = "decoder,code,L,noise,p,shots,failures,ler,ci_lo,ci_hi\n";
  for (const auto& r : results) {
    out += r.decoder + "," + std::string(to_string(r.code)) + "," + std::to_string(r.distance) + "," +
           std::string(to_string(r.noise)) + "," + format_double(r.p) + "," + std::to_string(r.shots) + "," +
           std::to_string(r.failures) + "," + format_double(r.ler) + "," + format_double(r.ci_lo) + "," +
           format_double(r.ci_hi) + "\n";
  }
  return out;
}

std::vector<BenchResult> parse_results_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line != "decoder,code,L,noise,p,shots,failures,ler,ci_lo,ci_hi") {
    throw std::invalid_argument("results CSV has an unexpected header");
  }
  std::vector<BenchResult> out;
  int row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::stringstream ss(line);
    for (std::string cell; std::getline(ss, cell, ',');) f.push_back(cell);
    if (f.size() != 10) throw std::invalid_argument("results CSV row " + std::to_string(row) + " has " + std::to_string(f.size()) + " fields");
    try {
      BenchResult r;
      r.decoder = f[0];
      r.code = parse_code_kind(f[1]);
      r.distance = std::stoi(f[2]);
      r.noise = parse_noise_kind(f[3]);
      r.p = std::stod(f[4]);
      r.shots = std::stol(f[5]);
      r.failures = std::stol(f[6]);
      r.ler = std::stod(f[7]);
      r.ci_lo = std::stod(f[8]);
      r.ci_hi = std::stod(f[9]);
      out.push_back(r);
    } catch (const std::exception& e) {
      throw std::invalid_argument("results CSV row " + std::to_string(row) + ": " + e.what());
    }
  }
  return out;
}

std::string histogram_csv(const std::vector<HistogramRow>& rows) {
  std::string out = "bin_lo,bin_hi,density\n";
  for (const auto& r : rows) out += format_double(r.bin_lo) + "," + format_double(r.bin_hi) + "," + format_double(r.density) + "\n";
  return out;
}

}  // namespace nmwpm
