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

#include "tdspec/scenario.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <sstream>

#include "tdspec/physical_spectrum.hpp"
#include "tdspec/trace_io.hpp"

namespace tdspec {

namespace {

double spacing(const std::vector<double>& omegas) {
  double worst = 0.0;
  for (std::size_t i = 1; i < omegas.size(); ++i) worst = std::max(worst, omegas[i] - omegas[i - 1]);
  return worst;
}

std::string fixed(double x, int digits = 4) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.*f", digits, x);
  return buf;
}

std::string scientific(double x) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.3e", x);
  return buf;
}

void fill_peaks(RouteResult& r, double frac) {
  r.peaks.clear();
  for (const auto& t : r.traces) r.peaks.push_back(find_peaks(t, frac));
}

class Runner {
 public:
  explicit Runner(const ScenarioConfig& cfg) : cfg_(cfg) { report_.scenario = cfg.scenario; }

  // Runs `body` as the named stage; on failure marks the run incomplete,
  // writes the manifest and throws ScenarioError.
  template <class F>
  auto stage(const std::string& name, F&& body) -> decltype(body()) {
    try {
      return body();
    } catch (const ScenarioError&) {
      throw;
    } catch (const std::exception& e) {
      report_.incomplete = true;
      report_.failed_stage = name;
      try {
        write_manifest_file(e.what());
      } catch (const std::exception&) {
        // The original failure is the one worth reporting.
      }
      throw ScenarioError(name, e.what(), report_);
    }
  }

  void emit(const std::string& name, const std::string& contents) {
    write_file(cfg_.output_dir / name, contents);
    report_.files.push_back(name);
  }

  void emit_trace(const SpectrumTrace& trace, const std::string& route, const Metadata& route_meta) {
    Metadata meta{{"route", route}};
    meta.insert(meta.end(), route_meta.begin(), route_meta.end());
    const Metadata params = cfg_.describe();
    meta.insert(meta.end(), params.begin(), params.end());
    std::ostringstream os;
    write_trace(os, trace, meta);
    emit(spectrum_filename(route, trace.readout_time), os.str());
  }

  void write_manifest_file(const std::string& error = {}) {
    Metadata meta = cfg_.describe();
    meta.emplace_back("status", report_.incomplete ? "incomplete" : "complete");
    if (report_.incomplete) {
      meta.emplace_back("failed_stage", report_.failed_stage);
      meta.emplace_back("error", error);
    }
    if (cfg_.scenario == ScenarioKind::analyzer_bank || cfg_.scenario == ScenarioKind::compare_all) {
      const auto omegas = cfg_.analyzer.omega.values();
      for (std::size_t i = 0; i < omegas.size(); ++i) {
        std::string seeds = "omega_b " + format_double(omegas[i]);
        if (cfg_.analyzer.method == AnalyzerMethod::mcwf) {
          seeds += ", seed[0] " + std::to_string(derive_seed(cfg_.base_seed, i, 0));
        }
        meta.emplace_back("analyzer[" + std::to_string(i) + "]", seeds);
      }
    }
    for (const auto& f : report_.files) meta.emplace_back("file", f);
    std::ostringstream os;
    write_manifest(os, meta);
    write_file(cfg_.output_dir / "manifest.txt", os.str());
  }

  RunReport& report() { return report_; }

 private:
  const ScenarioConfig& cfg_;
  RunReport report_;
};

std::string grid_check(const CorrelationGrid& g) {
  double asym = 0.0;
  double diag_min = 0.0;
  double diag_imag = 0.0;
  for (int m = 0; m <= g.N; ++m) {
    diag_min = std::min(diag_min, g.values(m, m).real());
    diag_imag = std::max(diag_imag, std::abs(g.values(m, m).imag()));
    for (int n = 0; n < m; ++n) asym = std::max(asym, std::abs(g.values(m, n) - std::conj(g.values(n, m))));
  }
  const bool ok = asym <= 1e-7 && diag_min >= -1e-9 && diag_imag <= 1e-9;
  return std::string(ok ? "ok  " : "FAIL") + " grid: conjugate asymmetry " + scientific(asym) +
         ", min diagonal " + scientific(diag_min) + ", max diagonal imag " + scientific(diag_imag);
}

std::string record_check(const std::vector<ExcitationRecord>& records) {
  double lo = 1.0;
  double hi = 0.0;
  for (const auto& r : records) {
    for (double v : r.p_excited) {
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
  }
  const bool ok = lo >= 0.0 && hi <= 1.0;
  return std::string(ok ? "ok  " : "FAIL") + " analyzer: excitation range [" + scientific(lo) + ", " +
         scientific(hi) + "]";
}

}  // namespace

ScenarioError::ScenarioError(std::string stage, const std::string& message, RunReport partial)
    : std::runtime_error("stage '" + stage + "' failed: " + message),
      stage_(std::move(stage)),
      partial_(std::move(partial)) {}

RouteResult stationary_route(const ScenarioConfig& cfg, std::vector<CoherentLine>* coherent) {
  const LindbladModel model = three_level_model(cfg.source);
  const DetectionOperator detector = DetectionOperator::three_level(cfg.source);
  WkOptions opts;
  opts.subtract_coherent = cfg.stationary.subtract_coherent;
  opts.taper_rate = cfg.stationary.taper_rate;
  const auto omegas = cfg.omega.values();
  RouteResult r;
  r.route = "wk";
  r.traces.push_back(wk_spectrum(model, detector, omegas, cfg.stationary.T_max, cfg.stationary.dtau, opts));
  r.resolution = spacing(omegas);
  fill_peaks(r, cfg.min_prominence);
  if (coherent) *coherent = coherent_lines(model, detector);
  return r;
}

RouteResult physical_route(const ScenarioConfig& cfg, double T, int N, const std::vector<double>& times,
                           const std::vector<double>& omegas, CorrelationGrid* grid_out) {
  const LindbladModel model = three_level_model(cfg.source);
  const DetectionOperator detector = DetectionOperator::three_level(cfg.source);
  const DensityMatrix rho0 = DensityMatrix::basis(model.space(), cfg.initial_level - 1);
  CorrelationGrid grid = correlation_grid(model, rho0, detector, T, N, cfg.physical.dt, cfg.workers);
  RouteResult r;
  r.route = "physical";
  r.traces = physical_spectrum_scan(grid, times, omegas, cfg.physical.gamma_f, cfg.workers);
  r.resolution = spacing(omegas);
  fill_peaks(r, cfg.min_prominence);
  if (grid_out) *grid_out = std::move(grid);
  return r;
}

RouteResult analyzer_route(const ScenarioConfig& cfg, const std::vector<double>& times,
                           std::vector<ExcitationRecord>* records_out) {
  AnalyzerBankConfig bank = cfg.bank_config();
  bank.T = std::max(bank.T, *std::max_element(times.begin(), times.end()));  // compare may read out past analyzer.T
  std::vector<ExcitationRecord> records = run_analyzer_bank(cfg.cascaded_params(), bank, cfg.analyzer.method,
                                                            cfg.initial_level - 1, cfg.workers);
  RouteResult r;
  r.route = "analyzer";
  r.traces = analyzer_spectrum(records, times, Normalization::unit_max);
  r.resolution = spacing(bank.omega_list);
  fill_peaks(r, cfg.min_prominence);
  if (records_out) *records_out = std::move(records);
  return r;
}

Alignment align_routes(const std::vector<RouteResult>& routes, const std::vector<std::size_t>& trace_index,
                       double tolerance) {
  if (routes.empty() || routes.size() != trace_index.size()) {
    throw std::invalid_argument("align_routes: need one trace index per route");
  }
  Alignment a;
  a.tolerance = tolerance;
  std::vector<PeakList> lists;
  for (std::size_t i = 0; i < routes.size(); ++i) {
    a.routes.push_back(routes[i].route);
    lists.push_back(routes[i].peaks.at(trace_index[i]));
  }
  // The other routes contribute their k most prominent maxima, with no prominence floor.
  const std::size_t k = lists.front().size();
  for (std::size_t i = 1; i < lists.size(); ++i) {
    lists[i] = top_peaks(find_peaks(routes[i].traces.at(trace_index[i]), 0.0), k);
  }
  a.agree = k > 0;
  for (std::size_t row = 0; row < k; ++row) {
    AlignmentRow r;
    double lo = 1e300;
    double hi = -1e300;
    bool complete = true;
    for (const auto& l : lists) {
      if (row < l.size()) {
        r.omegas.emplace_back(l[row].omega);
        lo = std::min(lo, l[row].omega);
        hi = std::max(hi, l[row].omega);
      } else {
        r.omegas.emplace_back(std::nullopt);
        complete = false;
      }
    }
    r.spread = complete ? hi - lo : std::numeric_limits<double>::infinity();
    a.agree = a.agree && complete && r.spread <= tolerance;
    a.rows.push_back(std::move(r));
  }
  return a;
}

std::string Alignment::table() const {
  std::ostringstream os;
  os << "peak";
  for (const auto& r : routes) os << '\t' << r;
  os << "\tspread\n";
  for (std::size_t i = 0; i < rows.size(); ++i) {
    os << i + 1;
    for (const auto& w : rows[i].omegas) os << '\t' << (w ? fixed(*w) : std::string("missing"));
    os << '\t' << (std::isfinite(rows[i].spread) ? fixed(rows[i].spread) : std::string("inf")) << '\n';
  }
  return os.str();
}

std::string RunReport::summary() const {
  std::ostringstream os;
  os << "scenario: " << to_string(scenario) << (incomplete ? " (INCOMPLETE, failed stage " + failed_stage + ")" : "")
     << '\n';
  for (const auto& r : routes) {
    for (std::size_t i = 0; i < r.traces.size(); ++i) {
      os << r.route << " t=" << format_double(r.traces[i].readout_time) << " peaks: " << describe(r.peaks[i])
         << '\n';
    }
  }
  for (const auto& c : coherent) {
    os << "coherent line at " << fixed(c.omega, 3) << " weight " << scientific(c.weight) << '\n';
  }
  if (alignment) {
    os << "peak alignment (tolerance " << fixed(alignment->tolerance) << "): "
       << (alignment->agree ? "agree" : "DISAGREE") << '\n'
       << alignment->table();
  }
  for (const auto& c : checks) os << "check " << c << '\n';
  os << "files: " << files.size() << '\n';
  os << "wall time: " << fixed(wall_seconds, 2) << " s\n";
  return os.str();
}

RunReport run_scenario(const ScenarioConfig& cfg) {
  cfg.validate();
  const auto start = std::chrono::steady_clock::now();
  Runner run(cfg);
  RunReport& rep = run.report();

  const bool want_wk = cfg.scenario == ScenarioKind::stationary_wk || cfg.scenario == ScenarioKind::compare_all;
  const bool want_phys = cfg.scenario == ScenarioKind::physical_scan || cfg.scenario == ScenarioKind::compare_all;
  const bool want_an = cfg.scenario == ScenarioKind::analyzer_bank || cfg.scenario == ScenarioKind::compare_all;
  const bool compare = cfg.scenario == ScenarioKind::compare_all;

  if (want_wk) {
    RouteResult r = run.stage("stationary_wk", [&] { return stationary_route(cfg, &rep.coherent); });
    run.stage("write_outputs", [&] {
      std::string lines;
      for (const auto& c : rep.coherent) {
        lines += (lines.empty() ? "" : ", ") + format_double(c.omega) + " x " + format_double(c.weight);
      }
      run.emit_trace(r.traces.front(), "wk", {{"coherent_lines", lines.empty() ? "none" : lines}});
      return 0;
    });
    rep.routes.push_back(std::move(r));
  }

  if (want_phys) {
    const double T = compare ? cfg.compare.time : cfg.physical.T;
    const int N = compare ? cfg.compare.N : cfg.physical.N;
    const std::vector<double> times = compare ? std::vector<double>{cfg.compare.time} : cfg.physical.times;
    const std::vector<double> omegas =
        compare ? linspace(cfg.omega.min, cfg.omega.max, cfg.compare.physical_omega_count) : cfg.omega.values();
    CorrelationGrid grid;
    RouteResult r = run.stage("physical_spectrum", [&] { return physical_route(cfg, T, N, times, omegas, &grid); });
    rep.checks.push_back(grid_check(grid));
    run.stage("write_outputs", [&] {
      if (!compare) {
        std::ostringstream os;
        write_grid(os, grid, cfg.describe());
        run.emit("grid.tsv", os.str());
      }
      for (const auto& t : r.traces) run.emit_trace(t, "physical", {{"gamma_f", format_double(cfg.physical.gamma_f)}});
      return 0;
    });
    rep.routes.push_back(std::move(r));
  }

  if (want_an) {
    const std::vector<double> times = compare ? std::vector<double>{cfg.compare.time} : cfg.analyzer.times;
    std::vector<ExcitationRecord> records;
    RouteResult r = run.stage("analyzer_bank", [&] { return analyzer_route(cfg, times, &records); });
    rep.checks.push_back(record_check(records));
    run.stage("write_outputs", [&] {
      for (std::size_t i = 0; i < records.size(); ++i) {
        std::ostringstream os;
        Metadata meta{{"index", std::to_string(i)}, {"method", to_string(cfg.analyzer.method)}};
        if (cfg.analyzer.method == AnalyzerMethod::mcwf) {
          meta.emplace_back("n_traj", std::to_string(cfg.analyzer.n_traj));
          meta.emplace_back("seed[0]", std::to_string(derive_seed(cfg.base_seed, i, 0)));
        }
        write_excitation(os, records[i], meta);
        run.emit("excitation_w" + std::to_string(i) + ".tsv", os.str());
      }
      for (const auto& t : r.traces) run.emit_trace(t, "analyzer", {{"gamma_b", format_double(cfg.cascaded.gamma_b)}});
      return 0;
    });
    rep.routes.push_back(std::move(r));
  }

  if (compare) {
    double res = 0.0;
    for (const auto& r : rep.routes) res = std::max(res, r.resolution);
    const double tol = 2.0 * std::max({cfg.physical.gamma_f, cfg.cascaded.gamma_b, res});
    rep.alignment = align_routes(rep.routes, std::vector<std::size_t>(rep.routes.size(), 0), tol);
    run.stage("write_outputs", [&] {
      std::ostringstream os;
      os << "# tdspec comparison\n# build: " << build_id() << "\n# readout_time: " << format_double(cfg.compare.time)
         << "\n# tolerance: " << format_double(tol) << "\n# agree: " << (rep.alignment->agree ? "true" : "false")
         << '\n'
         << rep.alignment->table();
      run.emit("comparison.tsv", os.str());
      return 0;
    });
  }

  run.stage("write_outputs", [&] {
    run.write_manifest_file();
    return 0;
  });
  rep.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return rep;
}

}  // namespace tdspec
