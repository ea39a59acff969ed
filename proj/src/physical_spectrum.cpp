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

#include "tdspec/physical_spectrum.hpp"

#include <cmath>
#include <sstream>

#include "tdspec/parallel.hpp"

namespace tdspec {

namespace {

int readout_index(const CorrelationGrid& grid, double t) {
  if (grid.N < 1 || grid.values.rows() != grid.N + 1 || grid.values.cols() != grid.N + 1) {
    throw DimensionError("CorrelationGrid shape does not match N");
  }
  if (t < 0.0) throw std::invalid_argument("physical spectrum readout time must be >= 0");
  const double pos = t / grid.dt();
  const double k = std::round(pos);
  if (k > grid.N || t > grid.T * (1.0 + 1e-12)) {
    std::ostringstream os;
    os << "readout time " << t << " beyond grid horizon " << grid.T;
    throw std::out_of_range(os.str());
  }
  if (std::abs(pos - k) > 1e-9 * std::max(1.0, pos)) {
    std::ostringstream os;
    os << "readout time " << t << " is not on the grid (dt = " << grid.dt() << ")";
    throw std::invalid_argument(os.str());
  }
  return static_cast<int>(k);
}

}  // namespace

void FilterParams::validate() const {
  if (!(gamma_f > 0.0) || !std::isfinite(gamma_f)) {
    throw std::invalid_argument("filter gamma_f must be > 0");
  }
  if (!std::isfinite(omega_f)) throw std::invalid_argument("filter omega_f must be finite");
}

cd filter_response(double t, const FilterParams& f) {
  if (t < 0.0) return 0.0;
  return f.gamma_f * std::exp(cd(-f.gamma_f * t, -f.omega_f * t));
}

cd physical_spectrum_value(const CorrelationGrid& grid, double t, const FilterParams& f) {
  f.validate();
  const int k = readout_index(grid, t);
  if (k == 0) return 0.0;
  const double dt = grid.dt();
  // S = gamma_f^2 dt^2 sum_mn conj(a_m) g(m, n) a_n, a_n = w_n e^{-(gamma_f + i omega_f)(t - t_n)}
  Vector a(k + 1);
  for (int n = 0; n <= k; ++n) {
    const double w = (n == 0 || n == k) ? 0.5 : 1.0;
    const double lag = t - n * dt;
    a(n) = w * std::exp(cd(-f.gamma_f * lag, -f.omega_f * lag));
  }
  const auto block = grid.values.topLeftCorner(k + 1, k + 1);
  const cd s = a.dot(block * a);  // dot() conjugates its left argument
  return f.gamma_f * f.gamma_f * dt * dt * s;
}

double physical_spectrum(const CorrelationGrid& grid, double t, const FilterParams& f) {
  return physical_spectrum_value(grid, t, f).real();
}

std::vector<SpectrumTrace> physical_spectrum_scan(const CorrelationGrid& grid,
                                                  const std::vector<double>& times,
                                                  const std::vector<double>& omegas,
                                                  double gamma_f, int workers) {
  FilterParams probe{0.0, gamma_f};
  probe.validate();
  for (double t : times) readout_index(grid, t);

  const std::size_t nw = omegas.size();
  std::vector<double> values(times.size() * nw);
  parallel_for(values.size(), workers, [&](std::size_t idx) {
    values[idx] = physical_spectrum(grid, times[idx / nw], FilterParams{omegas[idx % nw], gamma_f});
  });

  std::vector<SpectrumTrace> traces;
  for (std::size_t i = 0; i < times.size(); ++i) {
    SpectrumTrace trace;
    trace.readout_time = times[i];
    trace.normalization = Normalization::raw;
    double peak = 0.0;
    for (std::size_t j = 0; j < nw; ++j) peak = std::max(peak, values[i * nw + j]);
    for (std::size_t j = 0; j < nw; ++j) {
      const double v = values[i * nw + j];
      if (v < -1e-6 * peak) {
        std::ostringstream os;
        os << "physical spectrum at t=" << times[i] << ", omega_f=" << omegas[j] << " is " << v
           << " (max " << peak << "): quadrature error beyond bound";
        throw InvariantViolation(os.str());
      }
      trace.points.push_back({omegas[j], std::max(0.0, v)});
    }
    trace.validate();
    traces.push_back(std::move(trace));
  }
  return traces;
}

}  // namespace tdspec
