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

// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.
//
//   tdspec_acceptance            all criteria
//   tdspec_acceptance 3 7        selected criteria

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "support/oracles.hpp"
#include "tdspec/cascaded.hpp"
#include "tdspec/correlation.hpp"
#include "tdspec/peaks.hpp"
#include "tdspec/physical_spectrum.hpp"
#include "tdspec/scenario.hpp"

using namespace tdspec;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, x);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

ThreeLevelParams drive(double r) {
  ThreeLevelParams p;
  p.rabi = {r, r};
  return p;
}

const std::vector<double> kBand = linspace(0.0, 12.0, 1201);
const double kBandStep = 0.01;

SpectrumTrace stationary(double rabi) {
  const ThreeLevelParams p = drive(rabi);
  return wk_spectrum(three_level_model(p), DetectionOperator::three_level(p), kBand, 200.0, 0.02);
}

// Worst defects over the evolve runs made directly by this program.
StateDefects g_worst{0.0, 0.0, 1.0};

void absorb(const Trajectory& t) {
  g_worst.hermiticity = std::max(g_worst.hermiticity, t.worst.hermiticity);
  g_worst.trace = std::max(g_worst.trace, t.worst.trace);
  g_worst.min_eigenvalue = std::min(g_worst.min_eigenvalue, t.worst.min_eigenvalue);
}

// Reference peak positions shared by later criteria.
std::vector<double> g_weak_peaks;
std::vector<double> g_strong_peaks;

std::vector<double> reference_peaks(double rabi, std::vector<double>& cache) {
  if (cache.empty()) cache = peak_omegas(find_peaks(stationary(rabi)));
  return cache;
}

double max_offset(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size()) return INFINITY;
  double worst = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) worst = std::max(worst, std::abs(a[i] - b[i]));
  return worst;
}

std::string list(const std::vector<double>& v) {
  std::string s;
  for (double x : v) s += (s.empty() ? "" : ", ") + fmt("%.2f", x);
  return "[" + s + "]";
}

Outcome criterion1() {
  const auto t0 = std::chrono::steady_clock::now();
  const PeakList p = find_peaks(stationary(0.2));
  const double secs = seconds_since(t0);
  g_weak_peaks = peak_omegas(p);
  const bool ok = p.size() == 2 && std::abs(p[0].omega - 4.0) <= 0.1 && std::abs(p[1].omega - 8.0) <= 0.1;
  return {ok && secs < 10.0, "weak-drive WK peaks " + describe(p) + " (want 2 at 4+-0.1, 8+-0.1), " +
                                 fmt("%.2f s", secs) + " (< 10 s)"};
}

Outcome criterion2() {
  const auto t0 = std::chrono::steady_clock::now();
  const std::vector<double> w = peak_omegas(find_peaks(stationary(2.0)));
  const double secs = seconds_since(t0);
  g_strong_peaks = w;
  if (w.size() != 8) return {false, "strong-drive WK peaks " + list(w) + " (want 8)"};
  // centers, inner sideband pairs about 4 and 8, and the mirror w -> 12 - w that
  // exchanges the two structures
  double worst = std::max(std::abs(w[2] - 4.0), std::abs(w[5] - 8.0));
  worst = std::max(worst, std::abs(0.5 * (w[1] + w[3]) - 4.0));
  worst = std::max(worst, std::abs(0.5 * (w[4] + w[6]) - 8.0));
  for (int i = 0; i < 4; ++i) worst = std::max(worst, std::abs(0.5 * (w[i] + w[7 - i]) - 6.0));
  const bool ok = worst <= kBandStep && secs < 10.0;
  return {ok, "strong-drive WK peaks " + list(w) + ", worst pair asymmetry " + fmt("%.4f", worst) +
                  " (<= grid step 0.01), " + fmt("%.2f s", secs) + " (< 10 s)"};
}

Outcome criterion3() {
  const auto t0 = std::chrono::steady_clock::now();
  const ThreeLevelParams p = drive(2.0);
  const LindbladModel m = three_level_model(p);
  const CorrelationGrid g =
      correlation_grid(m, DensityMatrix::basis(m.space(), 1), DetectionOperator::three_level(p), 16.0, 256);
  const std::vector<double> times{1.0, 2.0, 4.0, 8.0, 16.0};
  const auto traces = physical_spectrum_scan(g, times, kBand, 0.1);
  const double secs = seconds_since(t0);

  std::vector<PeakList> peaks;
  for (const auto& t : traces) peaks.push_back(find_peaks(t));
  const std::size_t n1 = peaks[0].size(), n2 = peaks[1].size(), n4 = peaks[2].size();
  const std::size_t n8 = peaks[3].size(), n16 = peaks[4].size();
  const double offset = max_offset(peak_omegas(peaks[4]), reference_peaks(2.0, g_strong_peaks));

  std::ostringstream os;
  os << "peak counts t=1:" << n1 << " t=2:" << n2 << " t=4:" << n4 << " t=8:" << n8 << " t=16:" << n16
     << " (want <=2, <=2, >=4, 8, 8); t=16 offset from WK " << fmt("%.3f", offset) << " (<= 0.2); "
     << fmt("%.2f s", secs) << " (< 300 s)";
  const bool ok = n1 <= 2 && n2 <= 2 && n4 >= 4 && n8 == 8 && n16 == 8 && offset <= 0.2 && secs < 300.0;
  return {ok, os.str()};
}

Outcome criterion4() {
  const auto t0 = std::chrono::steady_clock::now();
  AnalyzerBankConfig bank;
  CascadedParams cp;
  std::ostringstream os;
  bool ok = true;
  const double dw = bank.omega_list[1] - bank.omega_list[0];
  const double tol = 2.0 * std::max(cp.gamma_b, dw);
  for (double rabi : {0.2, 2.0}) {
    cp.source = drive(rabi);
    const auto records = run_analyzer_bank(cp, bank, AnalyzerMethod::master_equation, 1);
    const std::vector<double> got = peak_omegas(find_peaks(analyzer_spectrum(records, {200.0}).front()));
    const std::vector<double> want =
        rabi < 1.0 ? reference_peaks(0.2, g_weak_peaks) : reference_peaks(2.0, g_strong_peaks);
    const double off = max_offset(got, want);
    ok = ok && off <= tol;
    os << (rabi < 1.0 ? "weak " : "strong ") << list(got) << " offset " << fmt("%.3f", off) << "; ";
  }
  const double secs = seconds_since(t0);
  os << "tolerance " << fmt("%.3f", tol) << ", " << fmt("%.1f s", secs) << " for both (< 120 s)";
  return {ok && secs < 120.0, os.str()};
}

Outcome criterion5() {
  const auto t0 = std::chrono::steady_clock::now();
  double worst = 0.0;
  for (double p : {0.0, 0.005, 0.1}) {
    CascadedParams cp;
    cp.p = p;
    const CascadedModel cm = build_cascaded(cp);
    const LindbladModel source = three_level_model(cp.source);
    const Trajectory joint = evolve(cm.model, cm.initial_state(1), 0.0, 200.0, 0.01);
    const Trajectory alone = evolve(source, DensityMatrix::basis(source.space(), 1), 0.0, 200.0, 0.01);
    absorb(joint);
    absorb(alone);
    for (std::size_t i = 0; i < joint.states.size(); ++i) {
      worst = std::max(worst, tdspec::testing::max_abs(partial_trace(joint.states[i], 0).matrix() -
                                                       alone.states[i].matrix()));
    }
  }
  const double secs = seconds_since(t0);
  return {worst <= 1e-8 && secs < 60.0, "max |Tr_B rho_AB - rho_A| over every step of [0, 200], p in {0, 0.005, 0.1}: " +
                                            fmt("%.2e", worst) + " (<= 1e-8), " + fmt("%.1f s", secs) + " (< 60 s)"};
}

Outcome criterion6() {
  const auto t0 = std::chrono::steady_clock::now();
  const McwfSettings s;
  const std::vector<double> omegas{2.6, 4.0, 6.6, 8.0};
  double worst_sigma = 0.0;
  std::vector<double> ratios;
  for (std::size_t f = 0; f < omegas.size(); ++f) {
    CascadedParams cp;
    cp.omega_b = omegas[f];
    const CascadedModel cm = build_cascaded(cp);
    const ExcitationRecord me = master_equation_excitation(cm, cm.initial_state(1), s);
    const ExcitationRecord mc300 = ensemble_excitation(cm, cm.initial_vector(1), s, 300, 1, f);
    const ExcitationRecord mc75 = ensemble_excitation(cm, cm.initial_vector(1), s, 75, 1, f);
    std::vector<double> r;
    for (std::size_t i = 0; i < me.times.size(); ++i) {
      const double dev = std::abs(mc300.p_excited[i] - me.p_excited[i]);
      if (mc300.std_error[i] > 0.0) {
        worst_sigma = std::max(worst_sigma, dev / mc300.std_error[i]);
        r.push_back(mc75.std_error[i] / mc300.std_error[i]);
      } else if (dev > 0.0) {
        worst_sigma = INFINITY;
      }
    }
    std::nth_element(r.begin(), r.begin() + r.size() / 2, r.end());
    ratios.push_back(r[r.size() / 2]);
  }
  double mean_ratio = 0.0;
  for (double r : ratios) mean_ratio += r / ratios.size();
  const double secs = seconds_since(t0);
  std::ostringstream os;
  os << "worst |MCWF - ME| / stderr over 4 omega_B x 201 times: " << fmt("%.2f", worst_sigma)
     << " (<= 4); stderr(75)/stderr(300) median per omega " << list(ratios) << ", mean "
     << fmt("%.3f", mean_ratio) << " (2 +- 0.4); " << fmt("%.1f s", secs) << " serial (< 1200 s)";
  const bool ok = worst_sigma <= 4.0 && std::abs(mean_ratio - 2.0) <= 0.4 && secs < 1200.0;
  return {ok, os.str()};
}

Outcome criterion7() {
  const auto t0 = std::chrono::steady_clock::now();
  const ThreeLevelParams p = drive(2.0);
  const LindbladModel m = three_level_model(p);
  const DetectionOperator det = DetectionOperator::three_level(p);
  const DensityMatrix rho0 = DensityMatrix::basis(m.space(), 1);
  const Matrix o = det.total().matrix();

  const CorrelationGrid g = correlation_grid(m, rho0, det, 1.4, 7);
  double grid_err = 0.0;
  for (int i = 0; i <= 7; ++i)
    for (int j = 0; j <= 7; ++j) {
      const cd want = tdspec::testing::lab_correlation_oracle(m, rho0.matrix(), det, g.time(i), g.time(j));
      grid_err = std::max(grid_err, std::abs(g.values(i, j) - want));
    }

  double qrt_err = 0.0;
  std::vector<double> taus;
  for (int k = 0; k < 8; ++k) taus.push_back(0.2 * k);
  for (int i = 0; i < 8; ++i) {
    const double t = 0.2 * i;
    const auto v = qrt_two_time(m, rho0, Operator(m.space(), o), Operator(m.space(), o.adjoint()), t, taus);
    for (std::size_t k = 0; k < taus.size(); ++k) {
      const cd want = tdspec::testing::two_time_oracle(m, rho0.matrix(), o, o.adjoint(), t, taus[k]);
      qrt_err = std::max(qrt_err, std::abs(v[k] - want));
    }
  }
  const double secs = seconds_since(t0);
  return {grid_err <= 1e-6 && qrt_err <= 1e-6 && secs < 30.0,
          "8x8 max abs error: correlation_grid " + fmt("%.2e", grid_err) + ", qrt_two_time " +
              fmt("%.2e", qrt_err) + " (<= 1e-6), " + fmt("%.2f s", secs) + " (< 30 s)"};
}

Outcome criterion8() {
  const auto t0 = std::chrono::steady_clock::now();
  // self-convergence: halve dt for the joint model and the bare source
  const CascadedModel cm = build_cascaded(CascadedParams{});
  // states are stored once per time unit in every run
  auto every = [](int n) {
    EvolveOptions o;
    o.store_every = n;
    return o;
  };
  const Trajectory a = evolve(cm.model, cm.initial_state(1), 0.0, 200.0, 0.01, every(100));
  const Trajectory b = evolve(cm.model, cm.initial_state(1), 0.0, 200.0, 0.005, every(200));
  const LindbladModel src = three_level_model(drive(2.0));
  const Trajectory c = evolve(src, DensityMatrix::basis(src.space(), 1), 0.0, 200.0, 0.02, every(50));
  const Trajectory d = evolve(src, DensityMatrix::basis(src.space(), 1), 0.0, 200.0, 0.01, every(100));
  for (const auto* t : {&a, &b, &c, &d}) absorb(*t);
  if (a.states.size() != b.states.size() || c.states.size() != a.states.size()) {
    return {false, "stored state counts differ"};
  }
  double change = 0.0;
  for (std::size_t i = 0; i < a.states.size(); ++i) {
    change = std::max(change, tdspec::testing::max_abs(a.states[i].matrix() - b.states[i].matrix()));
    change = std::max(change, tdspec::testing::max_abs(c.states[i].matrix() - d.states[i].matrix()));
  }
  const double secs = seconds_since(t0);
  std::ostringstream os;
  os << "worst over evolve runs: |Tr-1| " << fmt("%.1e", g_worst.trace) << ", hermiticity "
     << fmt("%.1e", g_worst.hermiticity) << " (<= 1e-9), min eigenvalue " << fmt("%.1e", g_worst.min_eigenvalue)
     << " (>= -1e-8); halving dt changes states by " << fmt("%.1e", change) << " (<= 1e-6); "
     << fmt("%.1f s", secs);
  const bool ok = g_worst.trace <= 1e-9 && g_worst.hermiticity <= 1e-9 && g_worst.min_eigenvalue >= -1e-8 &&
                  change <= 1e-6;
  return {ok, os.str()};
}

Outcome criterion9() {
  const auto t0 = std::chrono::steady_clock::now();
  const McwfSettings s{200.0, 0.01, 200.0};
  auto excitation = [&](double p) {
    CascadedParams cp;
    cp.p = p;
    const CascadedModel cm = build_cascaded(cp);
    return master_equation_excitation(cm, cm.initial_state(1), s).p_excited.back();
  };
  const double e5 = excitation(0.005);
  const double e25 = excitation(0.0025);
  const double e125 = excitation(0.00125);
  const double r1 = e25 / e5;
  const double r2 = e125 / e25;
  const double secs = seconds_since(t0);
  const bool ok = std::abs(r1 - 0.5) <= 0.025 && std::abs(r2 - 0.5) <= 0.025 && secs < 60.0;
  return {ok, "P_e(200) at omega_B=4: p=0.005 " + fmt("%.4e", e5) + ", ratios P(p/2)/P(p) " + fmt("%.4f", r1) +
                  ", " + fmt("%.4f", r2) + " (0.5 +- 5%), " + fmt("%.1f s", secs) + " (< 60 s)"};
}

Outcome criterion10() {
  const auto t0 = std::chrono::steady_clock::now();
  ScenarioConfig cfg = parse_config_string("scenario: compare_all");
  cfg.output_dir = std::filesystem::temp_directory_path() / "tdspec_acceptance_compare";
  std::filesystem::remove_all(cfg.output_dir);
  const RunReport rep = run_scenario(cfg);
  const double secs = seconds_since(t0);
  const Alignment& a = rep.alignment.value();
  double spread = 0.0;
  for (const auto& r : a.rows) spread = std::max(spread, r.spread);
  std::ostringstream os;
  os << a.rows.size() << " rows, worst spread " << fmt("%.4f", spread) << " (<= " << fmt("%.3f", a.tolerance)
     << "), " << fmt("%.1f s", secs) << "\n" << a.table();
  std::filesystem::remove_all(cfg.output_dir);
  return {a.agree && a.rows.size() == 8, os.str()};
}

}  // namespace

int main(int argc, char** argv) {
  const std::map<int, std::function<Outcome()>> criteria{
      {1, criterion1}, {2, criterion2}, {3, criterion3}, {4, criterion4},  {5, criterion5},
      {6, criterion6}, {7, criterion7}, {8, criterion8}, {9, criterion9}, {10, criterion10}};
  std::set<int> selected;
  for (int i = 1; i < argc; ++i) selected.insert(std::atoi(argv[i]));

  int failed = 0;
  for (const auto& [id, run] : criteria) {
    if (!selected.empty() && !selected.count(id)) continue;
    Outcome o;
    try {
      o = run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failed += o.pass ? 0 : 1;
    std::printf("criterion %2d: %s  %s\n", id, o.pass ? "PASS" : "FAIL", o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d failed\n", failed);
  return failed ? 1 : 0;
}
