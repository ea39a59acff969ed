// Copyright 2026 The tdspec Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "tdspec/config.hpp"

#include <cmath>
#include <set>
#include <sstream>

#include <yaml-cpp/yaml.h>

namespace tdspec {

namespace {

std::string join(const std::string& prefix, const std::string& key) {
  return prefix.empty() ? key : prefix + "." + key;
}

// Rejects keys of `node` outside `allowed`.
void check_keys(const YAML::Node& node, const std::string& path, const std::set<std::string>& allowed) {
  if (!node.IsMap()) throw ConfigError((path.empty() ? std::string("config") : path) + ": expected a mapping");
  for (const auto& kv : node) {
    const std::string key = kv.first.as<std::string>();
    if (!allowed.count(key)) throw ConfigError(join(path, key) + ": unknown key");
  }
}

template <class T>
T scalar(const YAML::Node& node, const std::string& path) {
  try {
    return node.as<T>();
  } catch (const YAML::Exception&) {
    throw ConfigError(path + ": invalid value '" + (node.IsScalar() ? node.Scalar() : std::string("<non-scalar>")) + "'");
  }
}

template <class T>
void read(const YAML::Node& parent, const std::string& prefix, const char* key, T& out) {
  const YAML::Node n = parent[key];
  if (n) out = scalar<T>(n, join(prefix, key));
}

template <std::size_t K>
void read_array(const YAML::Node& parent, const std::string& prefix, const char* key,
                std::array<double, K>& out) {
  const YAML::Node n = parent[key];
  if (!n) return;
  const std::string path = join(prefix, key);
  if (!n.IsSequence() || n.size() != K) {
    throw ConfigError(path + ": expected a list of " + std::to_string(K) + " numbers");
  }
  for (std::size_t i = 0; i < K; ++i) out[i] = scalar<double>(n[i], path);
}

void read_list(const YAML::Node& parent, const std::string& prefix, const char* key,
               std::vector<double>& out) {
  const YAML::Node n = parent[key];
  if (!n) return;
  const std::string path = join(prefix, key);
  if (n.IsScalar()) {
    out = {scalar<double>(n, path)};
    return;
  }
  if (!n.IsSequence()) throw ConfigError(path + ": expected a number or a list of numbers");
  out.clear();
  for (const auto& v : n) out.push_back(scalar<double>(v, path));
}

void read_omega(const YAML::Node& parent, const std::string& prefix, OmegaGridSpec& out) {
  const YAML::Node n = parent["omega"];
  if (!n) return;
  const std::string path = join(prefix, "omega");
  check_keys(n, path, {"min", "max", "count"});
  read(n, path, "min", out.min);
  read(n, path, "max", out.max);
  read(n, path, "count", out.count);
}

void require(bool ok, const std::string& path, const std::string& what) {
  if (!ok) throw ConfigError(path + ": " + what);
}

void check_omega(const OmegaGridSpec& g, const std::string& path) {
  require(std::isfinite(g.min) && std::isfinite(g.max), path, "bounds must be finite");
  require(g.count >= 1, path + ".count", "must be >= 1");
  require(g.count == 1 || g.max > g.min, path + ".max", "must exceed min");
}

void check_times(const std::vector<double>& times, double horizon, const std::string& path) {
  require(!times.empty(), path, "must not be empty");
  for (double t : times) {
    require(t >= 0.0 && t <= horizon * (1.0 + 1e-12), path, "readout times must lie in [0, horizon]");
  }
}

std::string list(const std::vector<double>& v) {
  std::string s = "[";
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ", " : "") + format_double(v[i]);
  return s + "]";
}

template <std::size_t K>
std::string list(const std::array<double, K>& v) {
  return list(std::vector<double>(v.begin(), v.end()));
}

}  // namespace

std::string to_string(ScenarioKind k) {
  switch (k) {
    case ScenarioKind::stationary_wk: return "stationary_wk";
    case ScenarioKind::physical_scan: return "physical_scan";
    case ScenarioKind::analyzer_bank: return "analyzer_bank";
    case ScenarioKind::compare_all: return "compare_all";
  }
  return "?";
}

ScenarioKind scenario_from_string(const std::string& s) {
  for (auto k : {ScenarioKind::stationary_wk, ScenarioKind::physical_scan, ScenarioKind::analyzer_bank,
                 ScenarioKind::compare_all}) {
    if (to_string(k) == s) return k;
  }
  throw ConfigError("scenario: unknown scenario '" + s + "'");
}

void ScenarioConfig::validate() const {
  try {
    source.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  require(initial_level >= 1 && initial_level <= 3, "initial_level", "must be 1, 2 or 3");
  check_omega(omega, "omega");

  require(stationary.T_max > 0.0, "stationary.T_max", "must be > 0");
  require(stationary.dtau > 0.0, "stationary.dtau", "must be > 0");
  const double ratio = stationary.T_max / stationary.dtau;
  require(std::abs(ratio - std::round(ratio)) <= 1e-9 * ratio, "stationary.dtau", "must divide T_max");

  require(physical.T > 0.0, "physical.T", "must be > 0");
  require(physical.N >= 2, "physical.N", "must be >= 2");
  require(physical.dt > 0.0, "physical.dt", "must be > 0");
  require(physical.gamma_f > 0.0, "physical.gamma_f", "must be > 0");
  check_times(physical.times, physical.T, "physical.times");

  require(cascaded.p >= 0.0 && cascaded.p <= 1.0, "cascaded.p", "must lie in [0, 1]");
  require(cascaded.gamma_b > 0.0, "cascaded.gamma_b", "must be > 0");

  require(analyzer.n_traj >= 1, "analyzer.n_traj", "must be >= 1");
  require(analyzer.T > 0.0, "analyzer.T", "must be > 0");
  require(analyzer.dt > 0.0, "analyzer.dt", "must be > 0");
  require(analyzer.record_dt > 0.0, "analyzer.record_dt", "must be > 0");
  check_omega(analyzer.omega, "analyzer.omega");
  check_times(analyzer.times, analyzer.T, "analyzer.times");

  require(compare.time > 0.0, "compare.time", "must be > 0");
  require(compare.N >= 2, "compare.N", "must be >= 2");
  require(compare.physical_omega_count >= 1, "compare.physical_omega_count", "must be >= 1");

  require(min_prominence >= 0.0 && min_prominence < 1.0, "peaks.min_prominence", "must lie in [0, 1)");
  require(workers >= 1, "workers", "must be >= 1");
  require(!output_dir.empty(), "output.dir", "must not be empty");
}

CascadedParams ScenarioConfig::cascaded_params(double omega_b) const {
  return CascadedParams{source, omega_b, cascaded.p, cascaded.gamma_b};
}

AnalyzerBankConfig ScenarioConfig::bank_config() const {
  AnalyzerBankConfig b;
  b.omega_list = analyzer.omega.values();
  b.n_traj = analyzer.n_traj;
  b.T = analyzer.T;
  b.dt = analyzer.dt;
  b.record_dt = analyzer.record_dt;
  b.base_seed = base_seed;
  return b;
}

Metadata ScenarioConfig::describe() const {
  auto grid = [](const OmegaGridSpec& g) {
    return format_double(g.min) + ":" + format_double(g.max) + ":" + std::to_string(g.count);
  };
  return {
      {"scenario", to_string(scenario)},
      {"source.energies", list(source.energies)},
      {"source.decays", list(source.decays)},
      {"source.rabi", list(source.rabi)},
      {"initial_level", std::to_string(initial_level)},
      {"omega", grid(omega)},
      {"stationary.T_max", format_double(stationary.T_max)},
      {"stationary.dtau", format_double(stationary.dtau)},
      {"stationary.taper_rate", stationary.taper_rate < 0.0 ? "auto" : format_double(stationary.taper_rate)},
      {"stationary.subtract_coherent", stationary.subtract_coherent ? "true" : "false"},
      {"physical.T", format_double(physical.T)},
      {"physical.N", std::to_string(physical.N)},
      {"physical.dt", format_double(physical.dt)},
      {"physical.gamma_f", format_double(physical.gamma_f)},
      {"physical.times", list(physical.times)},
      {"cascaded.p", format_double(cascaded.p)},
      {"cascaded.gamma_b", format_double(cascaded.gamma_b)},
      {"analyzer.method", to_string(analyzer.method)},
      {"analyzer.n_traj", std::to_string(analyzer.n_traj)},
      {"analyzer.T", format_double(analyzer.T)},
      {"analyzer.dt", format_double(analyzer.dt)},
      {"analyzer.record_dt", format_double(analyzer.record_dt)},
      {"analyzer.omega", grid(analyzer.omega)},
      {"analyzer.times", list(analyzer.times)},
      {"compare.time", format_double(compare.time)},
      {"compare.N", std::to_string(compare.N)},
      {"compare.physical_omega_count", std::to_string(compare.physical_omega_count)},
      {"peaks.min_prominence", format_double(min_prominence)},
      {"seed", std::to_string(base_seed)},
  };
}

ScenarioConfig parse_config_string(const std::string& text) {
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::Exception& e) {
    throw ConfigError(std::string("config: parse error: ") + e.what());
  }
  ScenarioConfig cfg;
  if (root.IsNull()) {
    cfg.validate();
    return cfg;
  }
  check_keys(root, "", {"scenario", "source", "initial_level", "omega", "stationary", "physical",
                        "cascaded", "analyzer", "compare", "peaks", "output", "seed", "workers"});

  if (root["scenario"]) cfg.scenario = scenario_from_string(scalar<std::string>(root["scenario"], "scenario"));
  if (const auto s = root["source"]) {
    check_keys(s, "source", {"energies", "decays", "rabi"});
    read_array(s, "source", "energies", cfg.source.energies);
    read_array(s, "source", "decays", cfg.source.decays);
    read_array(s, "source", "rabi", cfg.source.rabi);
  }
  read(root, "", "initial_level", cfg.initial_level);
  read_omega(root, "", cfg.omega);

  if (const auto s = root["stationary"]) {
    check_keys(s, "stationary", {"T_max", "dtau", "taper_rate", "subtract_coherent"});
    read(s, "stationary", "T_max", cfg.stationary.T_max);
    read(s, "stationary", "dtau", cfg.stationary.dtau);
    if (s["taper_rate"] && !(s["taper_rate"].IsScalar() && s["taper_rate"].Scalar() == "auto")) {
      read(s, "stationary", "taper_rate", cfg.stationary.taper_rate);
      require(cfg.stationary.taper_rate >= 0.0, "stationary.taper_rate", "must be >= 0 or 'auto'");
    }
    read(s, "stationary", "subtract_coherent", cfg.stationary.subtract_coherent);
  }
  if (const auto s = root["physical"]) {
    check_keys(s, "physical", {"T", "N", "dt", "gamma_f", "times"});
    read(s, "physical", "T", cfg.physical.T);
    read(s, "physical", "N", cfg.physical.N);
    read(s, "physical", "dt", cfg.physical.dt);
    read(s, "physical", "gamma_f", cfg.physical.gamma_f);
    read_list(s, "physical", "times", cfg.physical.times);
  }
  if (const auto s = root["cascaded"]) {
    check_keys(s, "cascaded", {"p", "gamma_b"});
    read(s, "cascaded", "p", cfg.cascaded.p);
    read(s, "cascaded", "gamma_b", cfg.cascaded.gamma_b);
  }
  if (const auto s = root["analyzer"]) {
    check_keys(s, "analyzer", {"method", "n_traj", "T", "dt", "record_dt", "omega", "times"});
    if (s["method"]) {
      try {
        cfg.analyzer.method = analyzer_method_from_string(scalar<std::string>(s["method"], "analyzer.method"));
      } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("analyzer.method: ") + e.what());
      }
    }
    read(s, "analyzer", "n_traj", cfg.analyzer.n_traj);
    read(s, "analyzer", "T", cfg.analyzer.T);
    read(s, "analyzer", "dt", cfg.analyzer.dt);
    read(s, "analyzer", "record_dt", cfg.analyzer.record_dt);
    read_omega(s, "analyzer", cfg.analyzer.omega);
    read_list(s, "analyzer", "times", cfg.analyzer.times);
  }
  if (const auto s = root["compare"]) {
    check_keys(s, "compare", {"time", "N", "physical_omega_count"});
    read(s, "compare", "time", cfg.compare.time);
    read(s, "compare", "N", cfg.compare.N);
    read(s, "compare", "physical_omega_count", cfg.compare.physical_omega_count);
  }
  if (const auto s = root["peaks"]) {
    check_keys(s, "peaks", {"min_prominence"});
    read(s, "peaks", "min_prominence", cfg.min_prominence);
  }
  if (const auto s = root["output"]) {
    check_keys(s, "output", {"dir"});
    if (s["dir"]) cfg.output_dir = scalar<std::string>(s["dir"], "output.dir");
  }
  read(root, "", "seed", cfg.base_seed);
  read(root, "", "workers", cfg.workers);
  cfg.validate();
  return cfg;
}

ScenarioConfig parse_config(const std::filesystem::path& path) {
  std::string text;
  try {
    text = read_file(path);
  } catch (const std::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  return parse_config_string(text);
}

}  // namespace tdspec
