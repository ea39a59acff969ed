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

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "tdspec/cascaded.hpp"
#include "tdspec/config.hpp"
#include "tdspec/correlation.hpp"
#include "tdspec/peaks.hpp"

namespace tdspec {

/// Output of one spectrum route: traces (one per readout time) and their peaks.
struct RouteResult {
  std::string route;  // "wk", "physical", "analyzer"
  std::vector<SpectrumTrace> traces;
  std::vector<PeakList> peaks;
  /// Omega spacing of the traces.
  double resolution = 0.0;
};

struct AlignmentRow {
  std::vector<std::optional<double>> omegas;  // one per route, empty if that route lacks the peak
  double spread = 0.0;
};

/// Peak-position table across routes. The first route is the reference: its
/// peak count K fixes the rows, and the other routes contribute their K most
/// prominent local maxima regardless of the prominence floor.
struct Alignment {
  std::vector<std::string> routes;
  std::vector<AlignmentRow> rows;
  double tolerance = 0.0;
  bool agree = false;

  std::string table() const;
};

Alignment align_routes(const std::vector<RouteResult>& routes, const std::vector<std::size_t>& trace_index,
                       double tolerance);

struct RunReport {
  ScenarioKind scenario = ScenarioKind::compare_all;
  std::vector<RouteResult> routes;
  std::vector<CoherentLine> coherent;
  std::optional<Alignment> alignment;
  std::vector<std::string> checks;
  std::vector<std::string> files;
  bool incomplete = false;
  std::string failed_stage;
  double wall_seconds = 0.0;

  std::string summary() const;
};

/// A stage failed. Outputs written before the failure are listed in the
/// manifest, which is marked incomplete.
class ScenarioError : public std::runtime_error {
 public:
  ScenarioError(std::string stage, const std::string& message, RunReport partial);
  const std::string& stage() const { return stage_; }
  const RunReport& partial() const { return partial_; }

 private:
  std::string stage_;
  RunReport partial_;
};

RunReport run_scenario(const ScenarioConfig& cfg);

// Routes, usable without touching the file system.

RouteResult stationary_route(const ScenarioConfig& cfg, std::vector<CoherentLine>* coherent = nullptr);

RouteResult physical_route(const ScenarioConfig& cfg, double T, int N, const std::vector<double>& times,
                           const std::vector<double>& omegas, CorrelationGrid* grid_out = nullptr);

RouteResult analyzer_route(const ScenarioConfig& cfg, const std::vector<double>& times,
                           std::vector<ExcitationRecord>* records_out = nullptr);

}  // namespace tdspec
