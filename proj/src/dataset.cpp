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

#include "nmwpm/dataset.hpp"

#include <sstream>
#include <stdexcept>

#include "nmwpm/io.hpp"
#include "nmwpm/parallel.hpp"
#include "nmwpm/trainer.hpp"

namespace nmwpm {

namespace {

constexpr std::uint32_t kBoundaryCode = 0xFFFFFFFFu;

}  // namespace

Dataset generate_dataset(const PathRouter& router, NoiseKind noise, double p_lo, double p_hi, long shots,
                         std::uint64_t seed, const GroundTruthOptions& gt, int threads) {
  const auto& lat = router.lattice();
  std::vector<DatasetRecord> recs(static_cast<std::size_t>(shots));
  std::vector<GroundTruthStatus> status(static_cast<std::size_t>(shots));
  parallel_for(static_cast<int>(shots), threads, [&](int i) {
    const auto idx = static_cast<std::uint64_t>(i);
    const auto shot = sample_shot(lat, noise, p_lo, p_hi, seed, Substream::Data, idx);
    const auto r = label_shot(shot.frame, router, gt);
    status[static_cast<std::size_t>(i)] = r.status;
    auto& rec = recs[static_cast<std::size_t>(i)];
    rec.index = idx;
    rec.p = shot.p;
    rec.syndrome = extract_syndrome(shot.frame, lat);
    rec.matching = r.matching;
  });
  Dataset ds;
  ds.code = lat.kind();
  ds.distance = lat.distance();
  ds.noise = noise;
  for (std::size_t i = 0; i < recs.size(); ++i) {
    if (status[i] == GroundTruthStatus::Timeout) {
      ++ds.timeouts;
    } else if (status[i] == GroundTruthStatus::Infeasible) {
      ++ds.infeasible;
    } else {
      ds.records.push_back(std::move(recs[i]));
    }
  }
  return ds;
}

std::vector<char> serialize_dataset(const Dataset& ds) {
  ByteWriter w;
  w.put_bytes(std::string_view(kDatasetMagic, 8));
  w.put<std::uint32_t>(static_cast<std::uint32_t>(ds.code));
  w.put<std::uint32_t>(static_cast<std::uint32_t>(ds.distance));
  w.put<std::uint32_t>(static_cast<std::uint32_t>(ds.noise));
  w.put<std::uint64_t>(ds.records.size());
  w.put<std::uint64_t>(static_cast<std::uint64_t>(ds.timeouts));
  w.put<std::uint64_t>(static_cast<std::uint64_t>(ds.infeasible));
  for (const auto& r : ds.records) {
    w.put<std::uint64_t>(r.index);
    w.put<double>(r.p);
    const auto n = static_cast<std::uint32_t>(r.syndrome.size());
    w.put<std::uint32_t>(n);
    std::string packed((n + 7) / 8, '\0');
    for (std::uint32_t i = 0; i < n; ++i) {
      if (r.syndrome.bits[i]) packed[i / 8] = static_cast<char>(packed[i / 8] | (1 << (i % 8)));
    }
    w.put_bytes(packed);
    for (const auto& cls : r.matching.classes) {
      w.put<std::uint32_t>(static_cast<std::uint32_t>(cls.size()));
      for (const auto& p : cls) {
        w.put<std::uint32_t>(static_cast<std::uint32_t>(p.a));
        w.put<std::uint32_t>(p.b == kBoundary ? kBoundaryCode : static_cast<std::uint32_t>(p.b));
        w.put<std::uint8_t>(p.route);
      }
    }
  }
  return w.bytes();
}

Dataset parse_dataset(std::vector<char> bytes) {
  ByteReader r(std::move(bytes));
  const auto magic = r.get_bytes(8);
  if (magic.compare(0, 7, kDatasetMagic, 7) != 0) throw std::runtime_error("not a dataset file");
  if (magic[7] != kDatasetMagic[7]) throw std::runtime_error("unsupported dataset version " + std::to_string(magic[7]));
  Dataset ds;
  const auto code = r.get<std::uint32_t>();
  if (code > 1) throw std::runtime_error("dataset has an unknown code kind");
  ds.code = static_cast<CodeKind>(code);
  ds.distance = static_cast<int>(r.get<std::uint32_t>());
  const auto noise = r.get<std::uint32_t>();
  if (noise > 1) throw std::runtime_error("dataset has an unknown noise kind");
  ds.noise = static_cast<NoiseKind>(noise);
  const auto count = r.get<std::uint64_t>();
  ds.timeouts = static_cast<long>(r.get<std::uint64_t>());
  ds.infeasible = static_cast<long>(r.get<std::uint64_t>());
  for (std::uint64_t k = 0; k < count; ++k) {
    DatasetRecord rec;
    rec.index = r.get<std::uint64_t>();
    rec.p = r.get<double>();
    const auto n = r.get<std::uint32_t>();
    const auto packed = r.get_bytes((n + 7) / 8);
    rec.syndrome.bits.resize(n);
    for (std::uint32_t i = 0; i < n; ++i) rec.syndrome.bits[i] = (static_cast<unsigned char>(packed[i / 8]) >> (i % 8)) & 1u;
    for (auto& cls : rec.matching.classes) {
      const auto m = r.get<std::uint32_t>();
      for (std::uint32_t j = 0; j < m; ++j) {
        MatchedPair p;
        p.a = static_cast<int>(r.get<std::uint32_t>());
        const auto b = r.get<std::uint32_t>();
        p.b = b == kBoundaryCode ? kBoundary : static_cast<int>(b);
        p.route = r.get<std::uint8_t>();
        if (p.a >= static_cast<int>(n) || p.b >= static_cast<int>(n)) throw std::runtime_error("dataset pair index out of range");
        cls.push_back(p);
      }
    }
    ds.records.push_back(std::move(rec));
  }
  if (!r.at_end()) throw std::runtime_error("trailing bytes after the last dataset record");
  return ds;
}

void save_dataset(const std::filesystem::path& path, const Dataset& ds) { atomic_write(path, serialize_dataset(ds)); }

Dataset load_dataset(const std::filesystem::path& path) { return parse_dataset(read_file(path)); }

std::vector<Syndrome> parse_syndromes(const std::string& text, int num_stabilizers) {
  std::vector<Syndrome> out;
  std::istringstream in(text);
  int line_no = 0;
  for (std::string line; std::getline(in, line);) {
    ++line_no;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    std::istringstream ls(line);
    std::string word;
    ls >> word;
    Syndrome s;
    s.bits.assign(static_cast<std::size_t>(num_stabilizers), 0);
    auto fail = [&](const std::string& why) {
      return std::invalid_argument("syndrome line " + std::to_string(line_no) + ": " + why);
    };
    if (word == "defects") {
      for (std::string tok; ls >> tok;) {
        int idx = 0;
        try {
          std::size_t used = 0;
          idx = std::stoi(tok, &used);
          if (used != tok.size()) throw std::invalid_argument(tok);
        } catch (const std::exception&) {
          throw fail("'" + tok + "' is not an index");
        }
        if (idx < 0 || idx >= num_stabilizers) throw fail("index " + tok + " out of range");
        s.bits[static_cast<std::size_t>(idx)] ^= 1;
      }
    } else {
      std::string rest;
      if (ls >> rest) throw fail("expected a single bit string");
      if (static_cast<int>(word.size()) != num_stabilizers) {
        throw fail("expected " + std::to_string(num_stabilizers) + " bits, got " + std::to_string(word.size()));
      }
      for (std::size_t i = 0; i < word.size(); ++i) {
        if (word[i] != '0' && word[i] != '1') throw fail("bits must be 0 or 1");
        s.bits[i] = static_cast<std::uint8_t>(word[i] - '0');
      }
    }
    out.push_back(std::move(s));
  }
  return out;
}

}  // namespace nmwpm
