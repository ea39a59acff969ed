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

#include <cstddef>
#include <string>
#include <vector>

#include "tdspec/correlation.hpp"

namespace tdspec {

/// Default peak threshold: prominence of at least 5% of the trace maximum.
inline constexpr double kDefaultProminence = 0.05;

struct Peak {
  double omega = 0.0;
  double intensity = 0.0;
  double prominence = 0.0;
  std::size_t index = 0;
};

using PeakList = std::vector<Peak>;

/// Interior local maxima (plateaus resolved to their middle sample) whose
/// topographic prominence is >= min_prominence_frac * max intensity. Sorted by omega.
PeakList find_peaks(const SpectrumTrace& trace, double min_prominence_frac = kDefaultProminence);

/// The k most prominent peaks, re-sorted by omega.
PeakList top_peaks(const PeakList& peaks, std::size_t k);

std::vector<double> peak_omegas(const PeakList& peaks);

/// "n @ w1, w2, ..." with two decimals.
std::string describe(const PeakList& peaks);

/// Largest |a_i - b_i| after pairing in omega order; infinity if the counts differ.
double max_pairwise_offset(const PeakList& a, const PeakList& b);

}  // namespace tdspec
