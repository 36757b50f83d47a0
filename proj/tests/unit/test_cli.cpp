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

#include <filesystem>
#include <fstream>
#include <sstream>

#include "commands.hpp"
#include "doctest.h"
#include "nmwpm/checkpoint.hpp"
#include "nmwpm/dataset.hpp"
#include "nmwpm/evaluator.hpp"
#include "nmwpm/io.hpp"

using namespace nmwpm;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code;
  std::string out, err;
};

Run invoke(std::vector<std::string> args) {
  args.insert(args.begin(), "nmwpm");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  const auto b = read_file(p);
  return std::string(b.begin(), b.end());
}

struct TempDir {
  fs::path path;
  TempDir() : path(fs::temp_directory_path() / "nmwpm_cli_test") {
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string file(const std::string& name, const std::string& text = "") const {
    if (!text.empty()) std::ofstream(path / name) << text;
    return (path / name).string();
  }
};

const char* kTiny =
    "code = toric\n"
    "distance = 4\n"
    "d_hidden = 8\n"
    "gnn_layers = 1\n"
    "heads = 2\n"
    "enc_layers = 1\n"
    "batch_size = 4\n"
    "batches_per_epoch = 2\n"
    "epochs = 2\n"
    "shots = 200\n"
    "threads = 1\n";

}  // namespace

TEST_CASE("bench on a p = 0 grid gives all-zero LERs and a manifest") {
  TempDir t;
  const auto cfg = t.file("c.txt", std::string(kTiny) + "p_grid = 0, 0\ndistances = 4, 6\n");
  const auto r = invoke({"bench", "--config", cfg, "--out", t.file("r.csv")});
  REQUIRE(r.code == 0);
  const auto res = parse_results_csv(slurp(t.file("r.csv")));
  CHECK(res.size() == 4);
  for (const auto& x : res) {
    CHECK(x.failures == 0);
    CHECK(x.ler == 0.0);
  }
  const auto manifest = slurp(t.file("r.csv.manifest"));
  CHECK(manifest.find("command = bench") != std::string::npos);
  CHECK(manifest.find("seed = 0") != std::string::npos);
}

TEST_CASE("config errors exit with 2, runtime failures with 3") {
  TempDir t;
  const auto cfg = t.file("c.txt", kTiny);
  CHECK(invoke({"bench", "--config", cfg, "--override", "colour=blue"}).code == 2);
  CHECK(invoke({"bench", "--config", t.file("absent.txt")}).code == 2);
  CHECK(invoke({"bench", "--config", cfg, "--seed", "x1"}).code == 2);
  CHECK(invoke({"bench", "--config", cfg, "--threads", "0"}).code == 2);
  CHECK(invoke({"frobnicate"}).code == 2);
  CHECK(invoke({}).code == 2);
  CHECK(invoke({"hist", "--config", cfg}).code == 2);
  CHECK(invoke({"hist", "--config", cfg, "--checkpoint", t.file("missing.ckpt")}).code == 3);
  const auto bad = invoke({"bench", "--config", t.file("b.txt", "distance = 4\nepochs = -1\n")});
  CHECK(bad.code == 2);
  CHECK(bad.err.find("config error") != std::string::npos);
}

TEST_CASE("decode of a two-defect syndrome prints one pair") {
  TempDir t;
  const auto cfg = t.file("c.txt", kTiny);
  const auto syn = t.file("s.txt", "# adjacent vertices\ndefects 0 1\n");
  const auto r = invoke({"decode", "--config", cfg, "--syndromes", syn});
  REQUIRE(r.code == 0);
  CHECK(r.out.find("pairs 1\n") != std::string::npos);
  CHECK(r.out.find("class 0 pair 0 1 path 0") != std::string::npos);
  CHECK(invoke({"decode", "--config", cfg}).code == 2);
}

TEST_CASE("train, then hist and decode with the checkpoint") {
  TempDir t;
  const auto cfg = t.file("c.txt", kTiny);
  const auto dir = (t.path / "run").string();
  const auto r = invoke({"train", "--config", cfg, "--out", dir, "--seed", "5"});
  REQUIRE(r.code == 0);
  const auto metrics = slurp(t.path / "run" / "metrics.csv");
  CHECK(std::count(metrics.begin(), metrics.end(), '\n') == 3);
  CHECK(slurp(t.path / "run" / "histograms.csv").rfind("epoch,bin_lo,bin_hi,density\n", 0) == 0);
  CHECK(slurp(t.path / "run" / "manifest.txt").find("seed = 5") != std::string::npos);
  const auto ckpt = (t.path / "run" / "model.ckpt").string();
  CHECK(load_checkpoint(ckpt).meta.at("format") == "qwp");

  const auto h = invoke({"hist", "--config", cfg, "--checkpoint", ckpt, "--out", t.file("h.csv")});
  REQUIRE(h.code == 0);
  const auto hist = slurp(t.file("h.csv"));
  CHECK(hist.rfind("bin_lo,bin_hi,density\n", 0) == 0);
  CHECK(std::count(hist.begin(), hist.end(), '\n') == 21);

  const auto syn = t.file("s.txt", "defects 0 1\n");
  const auto d = invoke({"decode", "--config", cfg, "--syndromes", syn, "--checkpoint", ckpt});
  REQUIRE(d.code == 0);
  CHECK(d.out.find("# decoder nmwpm") != std::string::npos);
  CHECK(d.out.find("pairs 1\n") != std::string::npos);

  // A checkpoint for L=4 cannot bench L=6.
  CHECK(invoke({"bench", "--config", cfg, "--override", "decoders=nmwpm", "--override", "distances=6", "--override",
             "p_grid=0.1", "--override", "checkpoint=" + ckpt})
            .code == 2);
  const auto b = invoke({"bench", "--config", cfg, "--override", "decoders=mwpm_manhattan,nmwpm", "--override",
                      "p_grid=0.05", "--override", "neural_shots=50", "--override", "checkpoint=" + ckpt, "--out",
                      t.file("b.csv")});
  REQUIRE(b.code == 0);
  CHECK(parse_results_csv(slurp(t.file("b.csv"))).size() == 2);
}

TEST_CASE("gen-data output replays bitwise") {
  TempDir t;
  const auto cfg = t.file("c.txt", kTiny);
  REQUIRE(invoke({"gen-data", "--config", cfg, "--out", t.file("a.bin"), "--seed", "3"}).code == 0);
  REQUIRE(invoke({"gen-data", "--config", cfg, "--out", t.file("b.bin"), "--seed", "3", "--threads", "3"}).code == 0);
  CHECK(slurp(t.file("a.bin")) == slurp(t.file("b.bin")));
  const auto ds = load_dataset(t.file("a.bin"));
  CHECK(ds.records.size() + static_cast<std::size_t>(ds.timeouts + ds.infeasible) == 200);
}

TEST_CASE("gt-audit reports full validity") {
  TempDir t;
  const auto cfg = t.file("c.txt", kTiny);
  const auto r = invoke({"gt-audit", "--config", cfg, "--override", "p_lo=0.1", "--override", "p_hi=0.1", "--out", t.file("a.txt")});
  REQUIRE(r.code == 0);
  CHECK(r.out.find("valid_rate = 1\n") != std::string::npos);
  CHECK(r.out.find("timeouts = 0\n") != std::string::npos);
}

TEST_CASE("threshold writes a results grid and a report") {
  TempDir t;
  const auto cfg = t.file("c.txt", "code = toric\ndistances = 4, 6\np_grid = 0.04, 0.07, 0.13, 0.16\nshots = 4000\n");
  const auto r = invoke({"threshold", "--config", cfg, "--out", t.file("t.csv")});
  REQUIRE(r.code == 0);
  CHECK(parse_results_csv(slurp(t.file("t.csv"))).size() == 8);
  const auto report = slurp(t.file("t.csv.report"));
  CHECK(report.find("crossing L=4/6") != std::string::npos);
  CHECK(invoke({"threshold", "--config", cfg, "--override", "decoders=mwpm_manhattan,nmwpm"}).code == 2);
}
