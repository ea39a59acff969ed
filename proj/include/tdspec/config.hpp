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

#pragma once

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include "tdspec/cascaded.hpp"
#include "tdspec/lindblad.hpp"
#include "tdspec/trace_io.hpp"

namespace tdspec {

enum class ScenarioKind { stationary_wk, physical_scan, analyzer_bank, compare_all };

std::string to_string(ScenarioKind k);
ScenarioKind scenario_from_string(const std::string& s);

/// Thrown for malformed or invalid configuration; the message starts with the key path.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct OmegaGridSpec {
  double min = 0.0;
  double max = 12.0;
  int count = 1201;

  std::vector<double> values() const { return linspace(min, max, count); }
  double spacing() const { return count > 1 ? (max - min) / (count - 1) : 0.0; }
};

struct ScenarioConfig {
  ScenarioKind scenario = ScenarioKind::compare_all;
  ThreeLevelParams source;
  /// 1-based source level of the initial projector |k><k|.
  int initial_level = 2;
  OmegaGridSpec omega;

  struct Stationary {
    double T_max = 200.0;
    double dtau = 0.02;
    double taper_rate = -1.0;  // negative: 4 / T_max
    bool subtract_coherent = true;
  } stationary;

  struct Physical {
    double T = 16.0;
    int N = 256;
    double dt = 0.02;
    double gamma_f = 0.1;
    std::vector<double> times{1.0, 2.0, 4.0, 8.0, 16.0};
  } physical;

  struct Cascaded {
    double p = 0.005;
    double gamma_b = 0.001;
  } cascaded;

  struct Analyzer {
    AnalyzerMethod method = AnalyzerMethod::master_equation;
    int n_traj = 300;
    double T = 200.0;
    double dt = 0.01;
    double record_dt = 1.0;
    OmegaGridSpec omega{0.0, 12.0, 128};
    std::vector<double> times{200.0};
  } analyzer;

  struct Compare {
    double time = 200.0;
    /// Physical-route grid points for [0, time]; 3200 keeps dt = 0.0625 at t = 200.
    int N = 3200;
    /// Omega points of the physical route's scan over the shared band.
    int physical_omega_count = 601;
  } compare;

  double min_prominence = 0.05;
  std::filesystem::path output_dir = "out";
  std::uint64_t base_seed = 1;
  int workers = 1;

  /// Throws ConfigError naming the offending key.
  void validate() const;
  CascadedParams cascaded_params(double omega_b = 4.0) const;
  AnalyzerBankConfig bank_config() const;
  /// Flattened "section.key: value" view for manifests and file headers.
  Metadata describe() const;
};

ScenarioConfig parse_config_string(const std::string& text);
ScenarioConfig parse_config(const std::filesystem::path& path);

}  // namespace tdspec
