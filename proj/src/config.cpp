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

#include "nmwpm/config.hpp"

#include <algorithm>
#include <charconv>
#include <functional>
#include <map>
#include <sstream>

#include "nmwpm/evaluator.hpp"
#include "nmwpm/parallel.hpp"

namespace nmwpm {

namespace {

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

template <typename T>
T parse_number(const std::string& key, const std::string& v) {
  T out{};
  const char* end = v.data() + v.size();
  const auto [ptr, ec] = std::from_chars(v.data(), end, out);
  if (ec != std::errc() || ptr != end || v.empty()) throw ConfigError("bad value for " + key + ": '" + v + "'");
  return out;
}

std::vector<std::string> split_list(const std::string& v) {
  std::vector<std::string> out;
  std::stringstream ss(v);
  for (std::string item; std::getline(ss, item, ',');) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

template <typename T>
std::string join(const std::vector<T>& v, const std::function<std::string(const T&)>& f) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) out += (i ? "," : "") + f(v[i]);
  return out;
}

struct Key {
  std::function<void(ExperimentConfig&, const std::string&, const std::string&)> set;
  std::function<std::string(const ExperimentConfig&)> get;
};

template <typename T, typename Member>
Key number(Member member) {
  return {[member](ExperimentConfig& c, const std::string& k, const std::string& v) { member(c) = parse_number<T>(k, v); },
          [member](const ExperimentConfig& c) {
            if constexpr (std::is_floating_point_v<T>) {
              return format_double(member(const_cast<ExperimentConfig&>(c)));
            } else {
              return std::to_string(member(const_cast<ExperimentConfig&>(c)));
            }
          }};
}

const std::vector<std::pair<std::string, Key>>& table() {
  static const std::vector<std::pair<std::string, Key>> keys = [] {
    std::vector<std::pair<std::string, Key>> k;
    k.emplace_back("code", Key{[](ExperimentConfig& c, const std::string& key, const std::string& v) {
                                 try {
                                   c.train.code = parse_code_kind(v);
                                 } catch (const std::invalid_argument& e) {
                                   throw ConfigError("bad value for " + key + ": " + e.what());
                                 }
                               },
                               [](const ExperimentConfig& c) { return std::string(to_string(c.train.code)); }});
    k.emplace_back("noise", Key{[](ExperimentConfig& c, const std::string& key, const std::string& v) {
                                  try {
                                    c.train.noise = parse_noise_kind(v);
                                  } catch (const std::invalid_argument& e) {
                                    throw ConfigError("bad value for " + key + ": " + e.what());
                                  }
                                },
                                [](const ExperimentConfig& c) { return std::string(to_string(c.train.noise)); }});
    k.emplace_back("distance", number<int>([](ExperimentConfig& c) -> int& { return c.train.distance; }));
    k.emplace_back("seed", number<std::uint64_t>([](ExperimentConfig& c) -> std::uint64_t& { return c.train.seed; }));
    k.emplace_back("threads", number<int>([](ExperimentConfig& c) -> int& { return c.train.threads; }));
    k.emplace_back("d_hidden", number<int>([](ExperimentConfig& c) -> int& { return c.train.model.d_hidden; }));
    k.emplace_back("gnn_layers", number<int>([](ExperimentConfig& c) -> int& { return c.train.model.gnn_layers; }));
    k.emplace_back("heads", number<int>([](ExperimentConfig& c) -> int& { return c.train.model.heads; }));
    k.emplace_back("enc_layers", number<int>([](ExperimentConfig& c) -> int& { return c.train.model.enc_layers; }));
    k.emplace_back("batch_size", number<int>([](ExperimentConfig& c) -> int& { return c.train.batch_size; }));
    k.emplace_back("batches_per_epoch", number<int>([](ExperimentConfig& c) -> int& { return c.train.batches_per_epoch; }));
    k.emplace_back("epochs", number<int>([](ExperimentConfig& c) -> int& { return c.train.epochs; }));
    k.emplace_back("lr_init", number<double>([](ExperimentConfig& c) -> double& { return c.train.lr_init; }));
    k.emplace_back("lr_min", number<double>([](ExperimentConfig& c) -> double& { return c.train.lr_min; }));
    k.emplace_back("lambda", number<double>([](ExperimentConfig& c) -> double& { return c.train.lambda; }));
    k.emplace_back("p_lo", Key{[](ExperimentConfig& c, const std::string& key, const std::string& v) {
                                 c.train.p_lo = parse_number<double>(key, v);
                                 c.p_range_set = true;
                               },
                               [](const ExperimentConfig& c) { return format_double(c.train.p_lo); }});
    k.emplace_back("p_hi", Key{[](ExperimentConfig& c, const std::string& key, const std::string& v) {
                                 c.train.p_hi = parse_number<double>(key, v);
                                 c.p_range_set = true;
                               },
                               [](const ExperimentConfig& c) { return format_double(c.train.p_hi); }});
    k.emplace_back("hist_bins", number<int>([](ExperimentConfig& c) -> int& { return c.train.hist_bins; }));
    k.emplace_back("gt_budget_ms",
                   number<double>([](ExperimentConfig& c) -> double& { return c.train.ground_truth.brute_force_budget_ms; }));
    k.emplace_back("gt_max_candidates",
                   number<int>([](ExperimentConfig& c) -> int& { return c.train.ground_truth.max_candidates; }));
    k.emplace_back("gt_max_exhaustive_defects",
                   number<int>([](ExperimentConfig& c) -> int& { return c.train.ground_truth.max_brute_force_defects; }));
    k.emplace_back("distances", Key{[](ExperimentConfig& c, const std::string& key, const std::string& v) {
                                      c.distances.clear();
                                      for (const auto& s : split_list(v)) c.distances.push_back(parse_number<int>(key, s));
                                    },
                                    [](const ExperimentConfig& c) {
                                      return join<int>(c.distances, [](const int& x) { return std::to_string(x); });
                                    }});
    k.emplace_back("p_grid", Key{[](ExperimentConfig& c, const std::string& key, const std::string& v) {
                                   c.p_grid.clear();
                                   for (const auto& s : split_list(v)) c.p_grid.push_back(parse_number<double>(key, s));
                                 },
                                 [](const ExperimentConfig& c) {
                                   return join<double>(c.p_grid, [](const double& x) { return format_double(x); });
                                 }});
    k.emplace_back("shots", number<long>([](ExperimentConfig& c) -> long& { return c.shots; }));
    k.emplace_back("neural_shots", number<long>([](ExperimentConfig& c) -> long& { return c.neural_shots; }));
    k.emplace_back("decoders", Key{[](ExperimentConfig& c, const std::string&, const std::string& v) { c.decoders = split_list(v); },
                                   [](const ExperimentConfig& c) {
                                     return join<std::string>(c.decoders, [](const std::string& x) { return x; });
                                   }});
    auto text = [](std::string ExperimentConfig::*m) {
      return Key{[m](ExperimentConfig& c, const std::string&, const std::string& v) { c.*m = v; },
                 [m](const ExperimentConfig& c) { return c.*m; }};
    };
    k.emplace_back("checkpoint", text(&ExperimentConfig::checkpoint));
    k.emplace_back("syndromes", text(&ExperimentConfig::syndromes));
    return k;
  }();
  return keys;
}

const Key& find_key(const std::string& key) {
  for (const auto& [name, k] : table()) {
    if (name == key) return k;
  }
  throw ConfigError("unknown config key '" + key + "'");
}

}  // namespace

void ExperimentConfig::validate() const {
  try {
    train.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  const int min_distance = train.code == CodeKind::Toric ? 2 : 3;
  auto check_distance = [&](int L) {
    if (L < min_distance) throw ConfigError("distance " + std::to_string(L) + " too small for the " + std::string(to_string(train.code)) + " code");
  };
  check_distance(train.distance);
  for (int L : distances) check_distance(L);
  for (double p : p_grid) {
    if (!(p >= 0.0 && p <= 1.0)) throw ConfigError("p_grid values must lie in [0, 1]");
  }
  if (shots < 1 || neural_shots < 1) throw ConfigError("shot counts must be >= 1");
  for (const auto& d : decoders) {
    if (d != "mwpm_manhattan" && d != "nmwpm") throw ConfigError("unknown decoder '" + d + "' (mwpm_manhattan, nmwpm)");
  }
  if (train.ground_truth.brute_force_budget_ms < 0 || train.ground_truth.max_candidates < 1 ||
      train.ground_truth.max_brute_force_defects < 0) {
    throw ConfigError("ground-truth limits must be non-negative (max_candidates >= 1)");
  }
}

void resolve_defaults(ExperimentConfig& cfg) {
  if (!cfg.p_range_set) {
    std::tie(cfg.train.p_lo, cfg.train.p_hi) = default_p_range(cfg.train.noise);
    cfg.p_range_set = true;
  }
  if (cfg.distances.empty()) cfg.distances.push_back(cfg.train.distance);
  if (cfg.train.threads == 0) cfg.train.threads = default_threads();
}

void apply_setting(ExperimentConfig& cfg, const std::string& key, const std::string& value) {
  find_key(key).set(cfg, key, value);
}

void apply_override(ExperimentConfig& cfg, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos) throw ConfigError("override '" + assignment + "' is not key=value");
  apply_setting(cfg, trim(assignment.substr(0, eq)), trim(assignment.substr(eq + 1)));
}

ExperimentConfig parse_config(const std::string& text) {
  ExperimentConfig cfg;
  std::istringstream in(text);
  int line_no = 0;
  for (std::string line; std::getline(in, line);) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError("config line " + std::to_string(line_no) + " is not key=value");
    try {
      apply_setting(cfg, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
    } catch (const ConfigError& e) {
      throw ConfigError("config line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return cfg;
}

std::string config_to_text(const ExperimentConfig& cfg) {
  std::string out;
  for (const auto& [name, k] : table()) {
    out += name + " = " + k.get(cfg) + "\n";
  }
  return out;
}

const std::vector<std::string>& config_keys() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> n;
    for (const auto& [name, _] : table()) n.push_back(name);
    return n;
  }();
  return names;
}

}  // namespace nmwpm
