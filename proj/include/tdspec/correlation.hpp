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

#include <string>
#include <vector>

#include "tdspec/lindblad.hpp"

namespace tdspec {

/// Default RK4 substep used by the QRT propagators.
inline constexpr double kQrtStep = 0.02;

/// Summand of a detection operator whose lab-frame Heisenberg phase is
/// e^{-i frequency t} relative to the frame the model is integrated in.
struct FrequencyComponent {
  Operator op;
  double frequency = 0.0;
};

/// Operator whose two-time correlations define the emitted spectrum. Spectra are
/// reported at lab frequencies; the components carry the frame phases that the
/// rotating-frame integration removed.
class DetectionOperator {
 public:
  explicit DetectionOperator(Operator op);
  explicit DetectionOperator(std::vector<FrequencyComponent> components);

  /// Gamma1 |1><2| (at w2 - w1) + Gamma2 |1><3| (at w3 - w1).
  static DetectionOperator three_level(const ThreeLevelParams& params);

  const std::vector<FrequencyComponent>& components() const { return components_; }
  const HilbertSpace& space() const { return components_.front().op.space(); }
  /// Schroedinger-picture sum of the components.
  Operator total() const;

 private:
  std::vector<FrequencyComponent> components_;
};

/// Table of <O^dag(t1) O(t2)> with t1 = m*dt (row), t2 = n*dt (column),
/// m, n = 0..N inclusive, dt = T/N.
struct CorrelationGrid {
  double T = 0.0;
  int N = 0;
  Matrix values;

  double dt() const { return T / N; }
  double time(int index) const { return index * dt(); }
};

enum class Normalization { raw, unit_max };

std::string to_string(Normalization n);
Normalization normalization_from_string(const std::string& s);

struct SpectrumPoint {
  double omega = 0.0;
  double intensity = 0.0;
};

struct SpectrumTrace {
  double readout_time = 0.0;
  std::vector<SpectrumPoint> points;
  Normalization normalization = Normalization::raw;

  /// Throws std::invalid_argument unless omegas strictly increase and intensities are >= 0.
  void validate() const;
  double max_intensity() const;
  SpectrumTrace unit_max() const;
  std::vector<double> omegas() const;
  std::vector<double> intensities() const;
};

/// Elastic (coherent) spectral line: a delta of the given weight at omega.
struct CoherentLine {
  double omega = 0.0;
  double weight = 0.0;
};

/// <O2(t+tau) O1(t)> for each tau >= 0 (ascending). rho0 is the state at time 0.
std::vector<cd> qrt_two_time(const LindbladModel& model, const DensityMatrix& rho0,
                             const Operator& o1, const Operator& o2, double t,
                             const std::vector<double>& taus, double dt = kQrtStep);

/// <O1(t) O2(t+tau) O3(t)> for each tau >= 0 (ascending).
std::vector<cd> qrt_sandwich(const LindbladModel& model, const DensityMatrix& rho0,
                             const Operator& o1, const Operator& o2, const Operator& o3,
                             double t, const std::vector<double>& taus, double dt = kQrtStep);

/// Lab-frame <O^dag(t1) O(t2)> for one time pair, propagated from the earlier of
/// the two times (no conjugate mirroring).
cd lab_correlation(const LindbladModel& model, const DensityMatrix& rho0,
                   const DetectionOperator& detector, double t1, double t2,
                   double dt = kQrtStep);

struct WkOptions {
  /// Remove the non-decaying part |<O_k>|^2 from the correlation before the
  /// transform; it is reported by coherent_lines() instead.
  bool subtract_coherent = true;
  /// Exponential taper exp(-rate*tau) on the correlation. Negative selects
  /// 4 / T_max; zero disables tapering.
  double taper_rate = -1.0;
  /// Clip negative intensities at 0 (the trace invariant). Off for diagnostics.
  bool clip = true;
  double dt = kQrtStep;
};

/// Stationary spectrum 2 Re int_0^T_max g(tau) e^{i omega tau} dtau with
/// g(tau) = <O^dag(t) O(t+tau)> at the steady state (trapezoid, clipped at 0).
SpectrumTrace wk_spectrum(const LindbladModel& model, const DetectionOperator& detector,
                          const std::vector<double>& omega_grid, double T_max, double dtau,
                          const WkOptions& options = {});

/// Steady-state correlation g(tau) on tau = 0, dtau, ..., T_max (lab frequencies,
/// cross-frequency terms dropped). Coherent part included.
std::vector<cd> stationary_correlation(const LindbladModel& model,
                                       const DetectionOperator& detector, double T_max,
                                       double dtau, double dt = kQrtStep);

std::vector<CoherentLine> coherent_lines(const LindbladModel& model,
                                         const DetectionOperator& detector);

/// Upper triangle (t1 >= t2) by the forward march from each t2, lower triangle
/// by conjugation. Rows are independent and run on `workers` threads.
CorrelationGrid correlation_grid(const LindbladModel& model, const DensityMatrix& rho0,
                                 const DetectionOperator& detector, double T, int N,
                                 double dt = kQrtStep, int workers = 1);

std::vector<double> linspace(double lo, double hi, int count);

}  // namespace tdspec
