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

#include <pybind11/functional.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <memory>

#include "nmwpm/blossom.hpp"
#include "nmwpm/checkpoint.hpp"
#include "nmwpm/config.hpp"
#include "nmwpm/decoder.hpp"
#include "nmwpm/decoding_graph.hpp"
#include "nmwpm/evaluator.hpp"
#include "nmwpm/ground_truth.hpp"
#include "nmwpm/noise.hpp"
#include "nmwpm/qwp.hpp"
#include "nmwpm/routing.hpp"
#include "nmwpm/trainer.hpp"

namespace py = pybind11;
using namespace nmwpm;

namespace {

using Bits = py::array_t<std::uint8_t, py::array::c_style | py::array::forcecast>;

// Lattice and router share one heap object so the router's back pointer
// stays valid for the lifetime of the Python handle.
struct Code {
  CodeLattice lattice;
  std::unique_ptr<PathRouter> router;

  Code(CodeKind kind, int distance) : lattice(build_lattice(kind, distance)) {
    router = std::make_unique<PathRouter>(lattice);
  }
};

Bits to_array(const std::vector<std::uint8_t>& v) {
  Bits a(static_cast<py::ssize_t>(v.size()));
  std::copy(v.begin(), v.end(), a.mutable_data());
  return a;
}

std::vector<std::uint8_t> from_array(const Bits& a, int expected, const char* what) {
  if (a.ndim() != 1 || a.shape(0) != expected)
    throw std::invalid_argument(std::string(what) + ": expected length " + std::to_string(expected));
  return {a.data(), a.data() + a.shape(0)};
}

PauliFrame frame_of(const Code& c, const Bits& x, const Bits& z) {
  PauliFrame f;
  f.x_bits = from_array(x, c.lattice.num_qubits(), "x");
  f.z_bits = from_array(z, c.lattice.num_qubits(), "z");
  return f;
}

Syndrome syndrome_of(const Code& c, const Bits& s) {
  return Syndrome{from_array(s, c.lattice.num_stabilizers(), "syndrome")};
}

// Matching as a list of (class, a, b, route); b == -1 marks the boundary.
using PairTuple = std::tuple<int, int, int, int>;

std::vector<PairTuple> to_tuples(const SyndromeMatching& m) {
  std::vector<PairTuple> out;
  for (int cls = 0; cls < kNumClasses; ++cls)
    for (const auto& p : m.classes[static_cast<std::size_t>(cls)]) out.emplace_back(cls, p.a, p.b, p.route);
  return out;
}

SyndromeMatching from_tuples(const std::vector<PairTuple>& pairs) {
  SyndromeMatching m;
  for (const auto& [cls, a, b, route] : pairs) {
    if (cls < 0 || cls >= kNumClasses) throw std::invalid_argument("class must be 0 or 1");
    m.classes[static_cast<std::size_t>(cls)].push_back({a, b, static_cast<std::uint8_t>(route)});
  }
  return m;
}

py::tuple frame_tuple(const PauliFrame& f) { return py::make_tuple(to_array(f.x_bits), to_array(f.z_bits)); }

MatchGraph match_graph(const py::array_t<double, py::array::c_style | py::array::forcecast>& w) {
  if (w.ndim() != 2 || w.shape(0) != w.shape(1)) throw std::invalid_argument("weights must be a square matrix");
  const int n = static_cast<int>(w.shape(0));
  MatchGraph g(n, MatchGraph::kAbsent);
  auto r = w.unchecked<2>();
  for (int u = 0; u < n; ++u)
    for (int v = u + 1; v < n; ++v) {
      if (r(u, v) != r(v, u)) throw std::invalid_argument("weights must be symmetric");
      g.set_weight(u, v, r(u, v));
    }
  return g;
}

py::dict bench_dict(const BenchResult& r) {
  py::dict d;
  d["decoder"] = r.decoder;
  d["code"] = std::string(to_string(r.code));
  d["distance"] = r.distance;
  d["noise"] = std::string(to_string(r.noise));
  d["p"] = r.p;
  d["shots"] = r.shots;
  d["failures"] = r.failures;
  d["ler"] = r.ler;
  d["ci_lo"] = r.ci_lo;
  d["ci_hi"] = r.ci_hi;
  return d;
}

BenchResult bench_from(const py::dict& d) {
  BenchResult r;
  r.decoder = d["decoder"].cast<std::string>();
  r.code = parse_code_kind(d["code"].cast<std::string>());
  r.distance = d["distance"].cast<int>();
  r.noise = parse_noise_kind(d["noise"].cast<std::string>());
  r.p = d["p"].cast<double>();
  r.shots = d["shots"].cast<long>();
  r.failures = d["failures"].cast<long>();
  r.ler = d.contains("ler") ? d["ler"].cast<double>() : static_cast<double>(r.failures) / static_cast<double>(r.shots);
  return r;
}

py::dict metrics_dict(const EpochMetrics& m) {
  py::dict d;
  d["epoch"] = m.epoch;
  d["loss"] = m.loss;
  d["bce"] = m.bce;
  d["entropy"] = m.entropy;
  d["edge_acc"] = m.edge_acc;
  d["gt_timeouts"] = m.gt_timeouts;
  d["gt_infeasible"] = m.gt_infeasible;
  d["lr"] = m.lr;
  d["histogram"] = m.histogram;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Neural MWPM decoder toolkit";
  m.attr("__version__") = NMWPM_VERSION;
  m.attr("BOUNDARY") = kBoundary;

  py::register_exception<GroundTruthTimeout>(m, "GroundTruthTimeout", PyExc_RuntimeError);
  py::register_exception<GroundTruthInfeasible>(m, "GroundTruthInfeasible", PyExc_RuntimeError);
  py::register_exception<NoCrossing>(m, "NoCrossing", PyExc_RuntimeError);

  py::class_<Code>(m, "Code")
      .def(py::init([](const std::string& code, int distance) {
             return std::make_unique<Code>(parse_code_kind(code), distance);
           }),
           py::arg("code"), py::arg("distance"))
      .def_property_readonly("code", [](const Code& c) { return std::string(to_string(c.lattice.kind())); })
      .def_property_readonly("distance", [](const Code& c) { return c.lattice.distance(); })
      .def_property_readonly("num_qubits", [](const Code& c) { return c.lattice.num_qubits(); })
      .def_property_readonly("num_stabilizers", [](const Code& c) { return c.lattice.num_stabilizers(); })
      .def_property_readonly("num_x_stabilizers", [](const Code& c) { return c.lattice.num_x_stabilizers(); })
      .def(
          "sample_error",
          [](const Code& c, const std::string& noise, double p, std::uint64_t seed) {
            return frame_tuple(sample_error({parse_noise_kind(noise), p}, c.lattice, seed));
          },
          py::arg("noise"), py::arg("p"), py::arg("seed"))
      .def(
          "syndrome",
          [](const Code& c, const Bits& x, const Bits& z) {
            return to_array(extract_syndrome(frame_of(c, x, z), c.lattice).bits);
          },
          py::arg("x"), py::arg("z"))
      .def(
          "is_logical_error",
          [](const Code& c, const Bits& x, const Bits& z, const Bits& cx, const Bits& cz) {
            return is_logical_error(frame_of(c, x, z), frame_of(c, cx, cz), c.lattice);
          },
          py::arg("x"), py::arg("z"), py::arg("cx"), py::arg("cz"))
      .def(
          "distance_between",
          [](const Code& c, int a, int b) {
            return b == kBoundary ? c.router->boundary_distance(a) : c.router->distance(a, b);
          },
          py::arg("a"), py::arg("b"))
      .def(
          "path", [](const Code& c, int a, int b, int route) {
            return c.router->path({a, b, static_cast<std::uint8_t>(route)});
          },
          py::arg("a"), py::arg("b"), py::arg("route") = 0)
      .def(
          "correction",
          [](const Code& c, const std::vector<PairTuple>& pairs) {
            return frame_tuple(c.router->correction(from_tuples(pairs)));
          },
          py::arg("pairs"))
      .def(
          "decode_mwpm",
          [](const Code& c, const Bits& s) {
            py::gil_scoped_release nogil;
            return to_tuples(MwpmDecoder(*c.router).decode(syndrome_of(c, s)));
          },
          py::arg("syndrome"))
      .def(
          "ground_truth",
          [](const Code& c, const Bits& x, const Bits& z, double budget_ms, int max_candidates,
             int max_exhaustive_defects) {
            const auto frame = frame_of(c, x, z);
            GroundTruthResult r;
            {
              py::gil_scoped_release nogil;
              r = label_shot(frame, *c.router, {budget_ms, max_candidates, max_exhaustive_defects});
            }
            static const char* names[] = {"labeled", "timeout", "infeasible"};
            py::dict d;
            d["status"] = names[static_cast<int>(r.status)];
            d["stage"] = r.stage;
            d["pairs"] = to_tuples(r.matching);
            return d;
          },
          py::arg("x"), py::arg("z"), py::arg("budget_ms") = 100.0, py::arg("max_candidates") = 50,
          py::arg("max_exhaustive_defects") = 24)
      .def(
          "is_valid_correction",
          [](const Code& c, const Bits& x, const Bits& z, const std::vector<PairTuple>& pairs) {
            return is_valid_correction(frame_of(c, x, z), from_tuples(pairs), *c.router);
          },
          py::arg("x"), py::arg("z"), py::arg("pairs"))
      .def(
          "run_ler",
          [](const Code& c, const std::string& noise, double p, long shots, std::uint64_t seed, int threads) {
            BenchResult r;
            {
              py::gil_scoped_release nogil;
              r = run_ler(MwpmDecoder(*c.router), *c.router, {parse_noise_kind(noise), p}, shots, seed, threads);
            }
            return bench_dict(r);
          },
          py::arg("noise"), py::arg("p"), py::arg("shots"), py::arg("seed") = 0, py::arg("threads") = 1);

  py::class_<QwpParams>(m, "Model")
      .def(py::init([](const Code& c, int d_hidden, int gnn_layers, int heads, int enc_layers, std::uint64_t seed) {
             QwpConfig cfg{d_hidden, gnn_layers, heads, enc_layers};
             cfg.validate();
             return QwpParams(cfg, c.lattice, seed);
           }),
           py::arg("code"), py::arg("d_hidden") = 128, py::arg("gnn_layers") = 4, py::arg("heads") = 4,
           py::arg("enc_layers") = 2, py::arg("seed") = 0)
      .def_static(
          "load", [](const std::filesystem::path& path) { return QwpParams::from_checkpoint(load_checkpoint(path)); },
          py::arg("path"))
      .def(
          "save", [](const QwpParams& p, const std::filesystem::path& path) { save_checkpoint(path, p.to_checkpoint()); },
          py::arg("path"))
      .def_property_readonly("num_parameters", &QwpParams::num_values)
      .def_property_readonly("code", [](const QwpParams& p) { return std::string(to_string(p.code_kind())); })
      .def_property_readonly("distance", &QwpParams::code_distance)
      .def_property_readonly("d_hidden", [](const QwpParams& p) { return p.config().d_hidden; })
      .def_property_readonly("names", &QwpParams::names)
      .def(
          "predict_edges",
          [](const QwpParams& params, const Code& c, const Bits& s, const std::string& noise) {
            const auto g = build_graph(syndrome_of(c, s), c.lattice, parse_noise_kind(noise));
            std::vector<double> prob;
            {
              py::gil_scoped_release nogil;
              prob = predict_edges(g, params);
            }
            std::vector<std::tuple<int, int, int, double>> out;
            for (std::size_t i = 0; i < g.edges.size(); ++i) {
              const auto& e = g.edges[i];
              auto stab = [&](int row) { return g.is_virtual(row) ? kBoundary : row; };
              out.emplace_back(e.cls, stab(e.src), stab(e.dst), prob[i]);
            }
            return out;
          },
          py::arg("code"), py::arg("syndrome"), py::arg("noise") = "independent",
          "Directed edges as (class, src, dst, probability); -1 is the virtual boundary node.")
      .def(
          "decode",
          [](const QwpParams& params, const Code& c, const Bits& s, const std::string& noise) {
            const auto syn = syndrome_of(c, s);
            py::gil_scoped_release nogil;
            return to_tuples(decode(syn, c.lattice, params, parse_noise_kind(noise)));
          },
          py::arg("code"), py::arg("syndrome"), py::arg("noise") = "independent")
      .def(
          "run_ler",
          [](const QwpParams& params, const Code& c, const std::string& noise, double p, long shots,
             std::uint64_t seed, int threads) {
            BenchResult r;
            {
              py::gil_scoped_release nogil;
              const NoiseKind kind = parse_noise_kind(noise);
              r = run_ler(NeuralDecoder(params, c.lattice, kind), *c.router, {kind, p}, shots, seed, threads);
            }
            return bench_dict(r);
          },
          py::arg("code"), py::arg("noise"), py::arg("p"), py::arg("shots"), py::arg("seed") = 0,
          py::arg("threads") = 1);

  m.def(
      "mwpm",
      [](const py::array_t<double, py::array::c_style | py::array::forcecast>& w, bool brute_force) {
        const auto g = match_graph(w);
        auto r = brute_force ? brute_force_mwpm(g) : mwpm(g);
        r.canonicalize();
        return py::make_tuple(r.pairs, r.total_weight(g));
      },
      py::arg("weights"), py::arg("brute_force") = false,
      "Minimum-weight perfect matching of a symmetric weight matrix (inf marks a missing edge).");

  m.def("wilson_interval", &wilson_interval, py::arg("k"), py::arg("n"), py::arg("z") = 1.959963984540054);
  m.def("histogram_density", &histogram_density, py::arg("values"), py::arg("bins") = 20);
  m.def("polarization", &polarization, py::arg("probabilities"));

  m.def(
      "estimate_threshold",
      [](const std::vector<py::dict>& rows) {
        std::vector<BenchResult> results;
        for (const auto& d : rows) results.push_back(bench_from(d));
        const auto est = estimate_threshold(results);
        py::list crossings;
        for (const auto& c : est.crossings)
          crossings.append(py::dict(py::arg("distance_small") = c.distance_small,
                                    py::arg("distance_large") = c.distance_large, py::arg("p") = c.p,
                                    py::arg("degenerate") = c.degenerate));
        return py::dict(py::arg("mean") = est.mean, py::arg("spread") = est.spread,
                        py::arg("crossings") = crossings);
      },
      py::arg("results"));

  m.def(
      "results_csv",
      [](const std::vector<py::dict>& rows) {
        std::vector<BenchResult> results;
        for (const auto& d : rows) results.push_back(bench_from(d));
        return results_csv(results);
      },
      py::arg("results"));
  m.def(
      "parse_results_csv",
      [](const std::string& text) {
        py::list out;
        for (const auto& r : parse_results_csv(text)) out.append(bench_dict(r));
        return out;
      },
      py::arg("text"));

  m.def(
      "config_to_text",
      [](const std::string& text) { return config_to_text(parse_config(text)); }, py::arg("text"),
      "Parse a config file body and print every key with its resolved value.");

  m.def(
      "train",
      [](const std::string& config_text, const std::vector<std::string>& overrides,
         const std::function<void(py::dict)>& on_epoch) {
        auto cfg = parse_config(config_text);
        for (const auto& o : overrides) apply_override(cfg, o);
        resolve_defaults(cfg);
        cfg.validate();
        EpochCallback cb;
        if (on_epoch)
          cb = [&](const EpochMetrics& em, const QwpParams&) {
            py::gil_scoped_acquire gil;
            on_epoch(metrics_dict(em));
          };
        TrainResult r;
        {
          py::gil_scoped_release nogil;
          r = train(cfg.train, cb);
        }
        py::list metrics;
        for (const auto& em : r.metrics) metrics.append(metrics_dict(em));
        return py::make_tuple(std::move(r.params), metrics);
      },
      py::arg("config") = "", py::arg("overrides") = std::vector<std::string>{},
      py::arg("on_epoch") = std::function<void(py::dict)>{},
      "Train from config text plus key=value overrides; returns (Model, per-epoch metrics).");

  m.def(
      "edge_accuracy",
      [](const QwpParams& params, const Code& c, const std::string& noise, double p_lo, double p_hi, long shots,
         std::uint64_t seed, int threads) {
        EdgeEvaluation ev;
        {
          py::gil_scoped_release nogil;
          ev = evaluate_edges(params, c.lattice, *c.router, parse_noise_kind(noise), p_lo, p_hi, shots, seed, {},
                              threads);
        }
        return py::dict(py::arg("accuracy") = ev.accuracy(), py::arg("edges") = ev.edges,
                        py::arg("discarded") = ev.discarded, py::arg("probabilities") = ev.probabilities);
      },
      py::arg("model"), py::arg("code"), py::arg("noise"), py::arg("p_lo"), py::arg("p_hi"), py::arg("shots"),
      py::arg("seed") = 0, py::arg("threads") = 1);
}
