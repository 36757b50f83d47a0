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

#include <stdexcept>
#include <string>
#include <vector>

#include "nmwpm/trainer.hpp"

namespace nmwpm {

class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Everything a CLI run can be told through a config file or --override.
// Training fields live in `train`; the rest drive data generation,
// benchmarking, threshold scans and histograms.
struct ExperimentConfig {
  ExperimentConfig() { train.threads = 0; }

  TrainConfig train;            // threads = 0 means all cores until resolved
  bool p_range_set = false;  // p_lo / p_hi given explicitly

  std::vector<int> distances;   // bench/threshold; empty means {train.distance}
  std::vector<double> p_grid;   // bench/threshold
  long shots = 100000;          // per bench point (baseline), gen-data, gt-audit
  long neural_shots = 10000;    // per bench point (nmwpm)
  std::vector<std::string> decoders{"mwpm_manhattan"};
  std::string checkpoint;       // nmwpm bench, hist, decode
  std::string syndromes;        // decode input

  void validate() const;  // throws ConfigError
};

// Fills what the user left open: the p range from the noise model, the
// distance list from `distance`, and the thread count from the host.
void resolve_defaults(ExperimentConfig& cfg);

// Applies one "key = value" assignment. Unknown keys and malformed values
// throw ConfigError.
void apply_setting(ExperimentConfig& cfg, const std::string& key, const std::string& value);
void apply_override(ExperimentConfig& cfg, const std::string& assignment);

// Parses a config file body: one key=value per line, '#' starts a comment.
ExperimentConfig parse_config(const std::string& text);

// Every key with its value, in a stable order; parse_config of the result
// reproduces the same config once defaults are resolved.
std::string config_to_text(const ExperimentConfig& cfg);

// Names of all recognised keys.
const std::vector<std::string>& config_keys();

}  // namespace nmwpm
