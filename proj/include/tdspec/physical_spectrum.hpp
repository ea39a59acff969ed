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

#include <vector>

#include "tdspec/correlation.hpp"

namespace tdspec {

struct FilterParams {
  double omega_f = 0.0;
  double gamma_f = 0.1;

  void validate() const;
};

/// Fabry-Perot response theta(t) gamma_f exp(-(gamma_f + i omega_f) t), theta(0) = 1.
cd filter_response(double t, const FilterParams& f);

/// Complex filtered double sum over grid points with t1, t2 <= t. The readout
/// time must sit on the grid (t = k * grid.dt()) and not exceed grid.T. The
/// correlation is zero before t = 0.
cd physical_spectrum_value(const CorrelationGrid& grid, double t, const FilterParams& f);

/// Re of physical_spectrum_value.
double physical_spectrum(const CorrelationGrid& grid, double t, const FilterParams& f);

/// One raw-normalized trace per readout time. Throws InvariantViolation if a
/// trace dips below -1e-6 of its maximum; smaller negative quadrature noise is
/// clipped to 0.
std::vector<SpectrumTrace> physical_spectrum_scan(const CorrelationGrid& grid,
                                                  const std::vector<double>& times,
                                                  const std::vector<double>& omegas,
                                                  double gamma_f, int workers = 1);

}  // namespace tdspec
