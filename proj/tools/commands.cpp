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

#include "commands.hpp"

#include <CLI11.hpp>

#include <charconv>
#include <filesystem>
#include <map>
#include <memory>
#include <sstream>

#include "nmwpm/config.hpp"
#include "nmwpm/dataset.hpp"
#include "nmwpm/decoder.hpp"
#include "nmwpm/evaluator.hpp"
#include "nmwpm/io.hpp"
#include "nmwpm/parallel.hpp"
#include "nmwpm/trainer.hpp"

namespace nmwpm::cli {

namespace fs = std::filesystem;

namespace {

struct Common {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::string out;
  std::optional<int> threads;
  std::vector<std::string> overrides;
  std::string checkpoint;
  std::string syndromes;
};

ExperimentConfig load_config(const Common& c) {
  ExperimentConfig cfg;
  if (!c.config_path.empty()) {
    std::vector<char> bytes;
    try {
      bytes = read_file(c.config_path);
    } catch (const std::runtime_error& e) {
      throw ConfigError(e.what());
    }
    cfg = parse_config(std::string(bytes.begin(), bytes.end()));
  }
  for (const auto& o : c.overrides) apply_override(cfg, o);
  if (c.seed) cfg.train.seed = *c.seed;
  if (c.threads) cfg.train.threads = *c.threads;
  if (!c.checkpoint.empty()) cfg.checkpoint = c.checkpoint;
  if (!c.syndromes.empty()) cfg.syndromes = c.syndromes;
  resolve_defaults(cfg);
  cfg.validate();
  return cfg;
}

void ensure_parent(const fs::path& p) {
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
}

void write_text(const fs::path& p, const std::string& text) {
  ensure_parent(p);
  atomic_write(p, std::string_view(text));
}

// Resolved config, seed and code version, so the run can be replayed.
void write_manifest(const fs::path& p, const std::string& command, const ExperimentConfig& cfg) {
  write_text(p, "# nmwpm run manifest\ncommand = " + command + "\nversion = " NMWPM_VERSION "\n" + config_to_text(cfg));
}

fs::path manifest_for(const fs::path& output) {
  auto m = output;
  m += ".manifest";
  return m;
}

QwpParams load_params(const std::string& path) {
  if (path.empty()) throw ConfigError("this command needs a checkpoint (checkpoint = ... or --checkpoint)");
  return QwpParams::from_checkpoint(load_checkpoint(path));
}

// The checkpoint fixes the lattice; a config that says otherwise is an error.
void check_lattice(const ExperimentConfig& cfg, const QwpParams& P, int distance) {
  if (P.code_kind() != cfg.train.code || P.code_distance() != distance) {
    throw ConfigError("checkpoint was trained for " + std::string(to_string(P.code_kind())) + " L=" +
                      std::to_string(P.code_distance()) + ", config asks for " + std::string(to_string(cfg.train.code)) +
                      " L=" + std::to_string(distance));
  }
}

int cmd_gen_data(const Common& c, std::ostream& out) {
  const auto cfg = load_config(c);
  const fs::path dst = c.out.empty() ? "dataset.bin" : c.out;
  const auto lat = build_lattice(cfg.train.code, cfg.train.distance);
  const PathRouter router(lat);
  const auto ds = generate_dataset(router, cfg.train.noise, cfg.train.p_lo, cfg.train.p_hi, cfg.shots, cfg.train.seed,
                                   cfg.train.ground_truth, cfg.train.threads);
  ensure_parent(dst);
  save_dataset(dst, ds);
  write_manifest(manifest_for(dst), "gen-data", cfg);
  out << "records " << ds.records.size() << " timeouts " << ds.timeouts << " infeasible " << ds.infeasible << " -> "
      << dst.string() << "\n";
  return kExitOk;
}

int cmd_train(const Common& c, std::ostream& out) {
  const auto cfg = load_config(c);
  const fs::path dir = c.out.empty() ? "run" : c.out;
  fs::create_directories(dir);
  write_manifest(dir / "manifest.txt", "train", cfg);
  std::vector<EpochMetrics> rows;
  std::string hist = "epoch,bin_lo,bin_hi,density\n";
  train(cfg.train, [&](const EpochMetrics& m, const QwpParams& P) {
    rows.push_back(m);
    const int bins = static_cast<int>(m.histogram.size());
    for (int b = 0; b < bins; ++b) {
      hist += std::to_string(m.epoch) + "," + format_double(static_cast<double>(b) / bins) + "," +
              format_double(static_cast<double>(b + 1) / bins) + "," + format_double(m.histogram[static_cast<std::size_t>(b)]) + "\n";
    }
    save_checkpoint(dir / "model.ckpt", P.to_checkpoint());
    write_text(dir / "metrics.csv", metrics_csv(rows));
    write_text(dir / "histograms.csv", hist);
    out << "epoch " << m.epoch << " loss " << format_double(m.loss) << " edge_acc " << format_double(m.edge_acc)
        << " gt_timeouts " << m.gt_timeouts << " gt_infeasible " << m.gt_infeasible << "\n";
    out.flush();
  });
  return kExitOk;
}

std::string describe(const SyndromeMatching& m, const PathRouter& router) {
  std::ostringstream os;
  for (int cls = 0; cls < kNumClasses; ++cls) {
    for (const auto& p : m.classes[static_cast<std::size_t>(cls)]) {
      os << "  class " << cls << " pair " << p.a << " " << (p.b == kBoundary ? std::string("boundary") : std::to_string(p.b))
         << " path";
      for (int q : router.path(p)) os << " " << q;
      os << "\n";
    }
  }
  const auto corr = router.correction(m);
  for (PauliType t : {PauliType::X, PauliType::Z}) {
    os << "  correction " << (t == PauliType::X ? "X" : "Z") << ":";
    for (int q = 0; q < corr.size(); ++q) {
      if (corr.bits(t)[static_cast<std::size_t>(q)]) os << " " << q;
    }
    os << "\n";
  }
  return os.str();
}

int cmd_decode(const Common& c, std::ostream& out) {
  auto cfg = load_config(c);
  if (cfg.syndromes.empty()) throw ConfigError("decode needs a syndrome file (syndromes = ... or --syndromes)");
  std::unique_ptr<QwpParams> params;
  if (!cfg.checkpoint.empty()) {
    params = std::make_unique<QwpParams>(load_params(cfg.checkpoint));
    cfg.train.code = params->code_kind();
    cfg.train.distance = params->code_distance();
  }
  const auto lat = build_lattice(cfg.train.code, cfg.train.distance);
  const PathRouter router(lat);
  std::unique_ptr<Decoder> dec;
  if (params) {
    dec = std::make_unique<NeuralDecoder>(*params, lat, cfg.train.noise);
  } else {
    dec = std::make_unique<MwpmDecoder>(router);
  }
  const auto bytes = read_file(cfg.syndromes);
  const auto syndromes = parse_syndromes(std::string(bytes.begin(), bytes.end()), lat.num_stabilizers());
  std::string report = "# decoder " + dec->tag() + " code " + std::string(to_string(lat.kind())) + " L " +
                       std::to_string(lat.distance()) + "\n";
  for (std::size_t i = 0; i < syndromes.size(); ++i) {
    const auto m = dec->decode(syndromes[i]);
    report += "syndrome " + std::to_string(i) + " pairs " + std::to_string(m.num_pairs()) + "\n" + describe(m, router);
  }
  if (c.out.empty()) {
    out << report;
  } else {
    write_text(c.out, report);
    write_manifest(manifest_for(c.out), "decode", cfg);
  }
  return kExitOk;
}

std::vector<BenchResult> run_grid(const ExperimentConfig& cfg, const std::vector<std::string>& decoders, std::ostream& out) {
  if (cfg.p_grid.empty()) throw ConfigError("p_grid is empty");
  std::unique_ptr<QwpParams> params;
  if (std::find(decoders.begin(), decoders.end(), "nmwpm") != decoders.end()) {
    params = std::make_unique<QwpParams>(load_params(cfg.checkpoint));
    for (int L : cfg.distances) check_lattice(cfg, *params, L);
  }
  std::vector<BenchResult> results;
  for (int L : cfg.distances) {
    const auto lat = build_lattice(cfg.train.code, L);
    const PathRouter router(lat);
    for (double p : cfg.p_grid) {
      for (const auto& name : decoders) {
        std::unique_ptr<Decoder> dec;
        long shots = cfg.shots;
        if (name == "nmwpm") {
          dec = std::make_unique<NeuralDecoder>(*params, lat, cfg.train.noise);
          shots = cfg.neural_shots;
        } else {
          dec = std::make_unique<MwpmDecoder>(router);
        }
        results.push_back(run_ler(*dec, router, {cfg.train.noise, p}, shots, cfg.train.seed, cfg.train.threads));
        const auto& r = results.back();
        out << r.decoder << " L=" << L << " p=" << format_double(p) << " ler=" << format_double(r.ler) << " ["
            << format_double(r.ci_lo) << ", " << format_double(r.ci_hi) << "]\n";
        out.flush();
      }
    }
  }
  return results;
}

int cmd_bench(const Common& c, std::ostream& out) {
  const auto cfg = load_config(c);
  const fs::path dst = c.out.empty() ? "results.csv" : c.out;
  const auto results = run_grid(cfg, cfg.decoders, out);
  write_text(dst, results_csv(results));
  write_manifest(manifest_for(dst), "bench", cfg);
  return kExitOk;
}

int cmd_threshold(const Common& c, std::ostream& out) {
  const auto cfg = load_config(c);
  if (cfg.decoders.size() != 1) throw ConfigError("threshold takes exactly one decoder");
  const fs::path dst = c.out.empty() ? "threshold.csv" : c.out;
  const auto results = run_grid(cfg, cfg.decoders, out);
  write_text(dst, results_csv(results));
  write_manifest(manifest_for(dst), "threshold", cfg);
  std::ostringstream rep;
  try {
    const auto est = estimate_threshold(results);
    for (const auto& x : est.crossings) {
      rep << "crossing L=" << x.distance_small << "/" << x.distance_large << " p="
          << (x.degenerate ? std::string("degenerate") : format_double(x.p)) << "\n";
    }
    rep << "threshold " << format_double(est.mean) << " spread " << format_double(est.spread)
        << (est.degenerate() ? " (degenerate pair flagged)" : "") << "\n";
  } catch (const NoCrossing& e) {
    rep << "no crossing: " << e.what() << "\n";
    auto report = dst;
    report += ".report";
    write_text(report, rep.str());
    out << rep.str();
    return kExitRuntime;
  }
  auto report = dst;
  report += ".report";
  write_text(report, rep.str());
  out << rep.str();
  return kExitOk;
}

int cmd_hist(const Common& c, std::ostream& out) {
  auto cfg = load_config(c);
  const auto P = load_params(cfg.checkpoint);
  check_lattice(cfg, P, cfg.train.distance);
  const auto lat = build_lattice(cfg.train.code, cfg.train.distance);
  const PathRouter router(lat);
  const auto ev = evaluate_edges(P, lat, router, cfg.train.noise, cfg.train.p_lo, cfg.train.p_hi, cfg.shots,
                                 cfg.train.seed, cfg.train.ground_truth, cfg.train.threads);
  const fs::path dst = c.out.empty() ? "histogram.csv" : c.out;
  write_text(dst, histogram_csv(export_histogram(ev.probabilities, cfg.train.hist_bins)));
  write_manifest(manifest_for(dst), "hist", cfg);
  out << "edges " << ev.edges << " accuracy " << format_double(ev.accuracy()) << " polarization "
      << format_double(polarization(ev.probabilities)) << " discarded " << ev.discarded << "\n";
  return kExitOk;
}

int cmd_gt_audit(const Common& c, std::ostream& out) {
  const auto cfg = load_config(c);
  const auto lat = build_lattice(cfg.train.code, cfg.train.distance);
  const PathRouter router(lat);
  const int n = static_cast<int>(cfg.shots);
  std::vector<GroundTruthResult> res(static_cast<std::size_t>(n));
  std::vector<std::uint8_t> valid(static_cast<std::size_t>(n), 0);
  parallel_for(n, cfg.train.threads, [&](int i) {
    const auto shot = sample_shot(lat, cfg.train.noise, cfg.train.p_lo, cfg.train.p_hi, cfg.train.seed, Substream::Data,
                                  static_cast<std::uint64_t>(i));
    auto& r = res[static_cast<std::size_t>(i)];
    r = label_shot(shot.frame, router, cfg.train.ground_truth);
    if (r.status == GroundTruthStatus::Labeled) valid[static_cast<std::size_t>(i)] = is_valid_correction(shot.frame, r.matching, router);
  });
  long labeled = 0, timeouts = 0, infeasible = 0, ok = 0;
  std::map<int, long> stages;
  for (int i = 0; i < n; ++i) {
    const auto& r = res[static_cast<std::size_t>(i)];
    if (r.status == GroundTruthStatus::Timeout) {
      ++timeouts;
    } else if (r.status == GroundTruthStatus::Infeasible) {
      ++infeasible;
    } else {
      ++labeled;
      ok += valid[static_cast<std::size_t>(i)];
      ++stages[r.stage];
    }
  }
  std::ostringstream rep;
  rep << "shots = " << n << "\nlabeled = " << labeled << "\ntimeouts = " << timeouts << "\ninfeasible = " << infeasible
      << "\ntimeout_rate = " << format_double(static_cast<double>(timeouts) / n)
      << "\ninfeasible_rate = " << format_double(static_cast<double>(infeasible) / n)
      << "\nvalid_rate = " << format_double(labeled ? static_cast<double>(ok) / static_cast<double>(labeled) : 1.0) << "\n";
  for (const auto& [stage, count] : stages) rep << "stage" << stage << " = " << count << "\n";
  if (!c.out.empty()) {
    write_text(c.out, rep.str());
    write_manifest(manifest_for(c.out), "gt-audit", cfg);
  }
  out << rep.str();
  return ok == labeled ? kExitOk : kExitRuntime;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Neural MWPM decoder toolkit"};
  app.require_subcommand(1);
  app.set_version_flag("--version", NMWPM_VERSION);
  Common common;
  std::string seed_text;
  int threads_flag = 0;

  using Handler = int (*)(const Common&, std::ostream&);
  std::vector<std::pair<CLI::App*, Handler>> subs;
  auto add = [&](const char* name, const char* help, Handler h) {
    auto* s = app.add_subcommand(name, help);
    s->add_option("--config", common.config_path, "key=value config file");
    s->add_option("--seed", seed_text, "experiment seed (overrides the config)");
    s->add_option("--out", common.out, "output path");
    s->add_option("--threads", threads_flag, "worker threads (default: all cores)")->check(CLI::PositiveNumber);
    s->add_option("--override", common.overrides, "key=value, applied after the config file")->take_all();
    subs.emplace_back(s, h);
    return s;
  };
  add("gen-data", "label shots into a dataset file", cmd_gen_data);
  add("train", "train a model; writes checkpoint, metrics and histograms into --out", cmd_train);
  auto* dec = add("decode", "decode syndromes from a file and list matchings and corrections", cmd_decode);
  dec->add_option("--syndromes", common.syndromes, "syndrome file");
  dec->add_option("--checkpoint", common.checkpoint, "model checkpoint (baseline MWPM if omitted)");
  add("bench", "logical error rates over distances x p_grid", cmd_bench);
  add("threshold", "LER grid plus crossing estimate", cmd_threshold);
  auto* hist = add("hist", "histogram of predicted edge probabilities", cmd_hist);
  hist->add_option("--checkpoint", common.checkpoint, "model checkpoint");
  add("gt-audit", "ground-truth validity report", cmd_gt_audit);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    std::ostringstream o, e2;
    const int code = app.exit(e, o, e2);
    out << o.str();
    err << e2.str();
    return code == 0 ? kExitOk : kExitConfig;
  }
  try {
    if (!seed_text.empty()) {
      std::uint64_t s = 0;
      const auto [ptr, ec] = std::from_chars(seed_text.data(), seed_text.data() + seed_text.size(), s);
      if (ec != std::errc() || ptr != seed_text.data() + seed_text.size()) throw ConfigError("bad --seed '" + seed_text + "'");
      common.seed = s;
    }
    if (threads_flag > 0) common.threads = threads_flag;
    for (const auto& [s, h] : subs) {
      if (s->parsed()) return h(common, out);
    }
    return kExitConfig;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
}

}  // namespace nmwpm::cli
