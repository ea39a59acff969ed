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

// tdspec: spectra of a driven three-level atom by three routes.
//
//   tdspec stationary --config weak.yaml --out out/weak
//   tdspec physical --time 1 --time 8 --time 16
//   tdspec analyzer --workers 8 --seed 7
//   tdspec compare --out out/compare

#include <cstdint>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "tdspec/config.hpp"
#include "tdspec/scenario.hpp"

namespace {

struct Overrides {
  std::string config;
  std::string out;
  std::optional<std::uint64_t> seed;
  std::optional<int> workers;
  std::optional<double> omega_min;
  std::optional<double> omega_max;
  std::optional<int> omega_count;
  std::vector<double> times;
  std::string method;
};

void add_common(CLI::App* cmd, Overrides& o) {
  cmd->add_option("--config", o.config, "YAML configuration file (defaults apply when omitted)")
      ->check(CLI::ExistingFile);
  cmd->add_option("--out", o.out, "Output directory");
  cmd->add_option("--seed", o.seed, "Base seed for trajectory ensembles");
  cmd->add_option("--workers", o.workers, "Worker threads")->check(CLI::PositiveNumber);
  cmd->add_option("--omega-min", o.omega_min, "Lower end of the frequency band");
  cmd->add_option("--omega-max", o.omega_max, "Upper end of the frequency band");
  cmd->add_option("--omega-count", o.omega_count, "Number of frequencies in the band")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--time", o.times, "Readout time (repeatable)")->take_all();
}

tdspec::ScenarioConfig resolve(tdspec::ScenarioKind kind, const Overrides& o) {
  tdspec::ScenarioConfig cfg = o.config.empty() ? tdspec::parse_config_string("") : tdspec::parse_config(o.config);
  cfg.scenario = kind;
  if (!o.out.empty()) cfg.output_dir = o.out;
  if (o.seed) cfg.base_seed = *o.seed;
  if (o.workers) cfg.workers = *o.workers;

  tdspec::OmegaGridSpec& band = kind == tdspec::ScenarioKind::analyzer_bank ? cfg.analyzer.omega : cfg.omega;
  if (o.omega_min) band.min = *o.omega_min;
  if (o.omega_max) band.max = *o.omega_max;
  if (o.omega_count) band.count = *o.omega_count;

  if (!o.times.empty()) {
    switch (kind) {
      case tdspec::ScenarioKind::stationary_wk:
        if (o.times.size() != 1) throw tdspec::ConfigError("--time: stationary takes one horizon T_max");
        cfg.stationary.T_max = o.times.front();
        break;
      case tdspec::ScenarioKind::physical_scan:
        cfg.physical.times = o.times;
        break;
      case tdspec::ScenarioKind::analyzer_bank:
        cfg.analyzer.times = o.times;
        break;
      case tdspec::ScenarioKind::compare_all:
        if (o.times.size() != 1) throw tdspec::ConfigError("--time: compare takes one readout time");
        cfg.compare.time = o.times.front();
        break;
    }
  }
  if (!o.method.empty()) {
    try {
      cfg.analyzer.method = tdspec::analyzer_method_from_string(o.method);
    } catch (const std::invalid_argument& e) {
      throw tdspec::ConfigError(std::string("--method: ") + e.what());
    }
  }
  cfg.validate();
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Stationary and time-dependent spectra of a driven three-level atom"};
  app.require_subcommand(1);
  app.set_version_flag("--version", tdspec::build_id());

  Overrides o;
  struct Sub {
    const char* name;
    const char* help;
    tdspec::ScenarioKind kind;
  };
  const Sub subs[] = {
      {"stationary", "Wiener-Khintchine spectrum of the steady state (--time sets T_max)",
       tdspec::ScenarioKind::stationary_wk},
      {"physical", "Time-dependent filtered spectrum from the two-time correlation grid",
       tdspec::ScenarioKind::physical_scan},
      {"analyzer", "Cascaded analyzer-atom bank (--omega-* set the analyzer band)",
       tdspec::ScenarioKind::analyzer_bank},
      {"compare", "All three routes at one readout time with a peak alignment table",
       tdspec::ScenarioKind::compare_all},
  };
  for (const auto& s : subs) {
    CLI::App* cmd = app.add_subcommand(s.name, s.help);
    add_common(cmd, o);
    if (s.kind == tdspec::ScenarioKind::analyzer_bank || s.kind == tdspec::ScenarioKind::compare_all) {
      cmd->add_option("--method", o.method, "Analyzer method: master_equation or mcwf");
    }
  }

  CLI11_PARSE(app, argc, argv);

  tdspec::ScenarioKind kind = tdspec::ScenarioKind::compare_all;
  for (const auto& s : subs) {
    if (app.got_subcommand(s.name)) kind = s.kind;
  }

  tdspec::ScenarioConfig cfg;
  try {
    cfg = resolve(kind, o);
  } catch (const tdspec::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  }

  try {
    const tdspec::RunReport report = tdspec::run_scenario(cfg);
    std::cout << report.summary();
    std::cout << "output: " << cfg.output_dir.string() << '\n';
  } catch (const tdspec::ScenarioError& e) {
    std::cerr << "error: " << e.what() << '\n';
    std::cerr << "partial outputs in " << cfg.output_dir.string() << " are marked incomplete\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
