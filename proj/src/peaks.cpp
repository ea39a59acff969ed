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

#include "tdspec/peaks.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

namespace tdspec {

PeakList find_peaks(const SpectrumTrace& trace, double min_prominence_frac) {
  if (trace.points.empty()) throw std::invalid_argument("find_peaks: empty trace");
  const std::vector<double> y = trace.intensities();
  const std::size_t n = y.size();
  const double ymax = *std::max_element(y.begin(), y.end());
  PeakList peaks;
  if (!(ymax > 0.0)) return peaks;

  std::size_t i = 1;
  while (i + 1 < n) {
    if (!(y[i] > y[i - 1])) {
      ++i;
      continue;
    }
    std::size_t ahead = i + 1;
    while (ahead + 1 < n && y[ahead] == y[i]) ++ahead;
    if (y[ahead] < y[i]) {
      const std::size_t left_edge = i;
      const std::size_t right_edge = ahead - 1;
      const std::size_t mid = (left_edge + right_edge) / 2;
      // Topographic prominence: descend on each side until a higher sample.
      double left_min = y[i];
      for (std::size_t j = left_edge; j-- > 0;) {
        if (y[j] > y[i]) break;
        left_min = std::min(left_min, y[j]);
      }
      double right_min = y[i];
      for (std::size_t j = right_edge + 1; j < n; ++j) {
        if (y[j] > y[i]) break;
        right_min = std::min(right_min, y[j]);
      }
      const double prominence = y[i] - std::max(left_min, right_min);
      if (prominence > 0.0 && prominence >= min_prominence_frac * ymax) {
        peaks.push_back({trace.points[mid].omega, y[mid], prominence, mid});
      }
    }
    i = ahead;
  }
  return peaks;
}

PeakList top_peaks(const PeakList& peaks, std::size_t k) {
  PeakList out = peaks;
  std::stable_sort(out.begin(), out.end(),
                   [](const Peak& a, const Peak& b) { return a.prominence > b.prominence; });
  if (out.size() > k) out.resize(k);
  std::sort(out.begin(), out.end(), [](const Peak& a, const Peak& b) { return a.omega < b.omega; });
  return out;
}

std::vector<double> peak_omegas(const PeakList& peaks) {
  std::vector<double> v;
  for (const auto& p : peaks) v.push_back(p.omega);
  return v;
}

std::string describe(const PeakList& peaks) {
  std::string s = std::to_string(peaks.size());
  if (!peaks.empty()) s += " @";
  char buf[32];
  for (std::size_t i = 0; i < peaks.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%s %.2f", i ? "," : "", peaks[i].omega);
    s += buf;
  }
  return s;
}

double max_pairwise_offset(const PeakList& a, const PeakList& b) {
  if (a.size() != b.size()) return std::numeric_limits<double>::infinity();
  double worst = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) worst = std::max(worst, std::abs(a[i].omega - b[i].omega));
  return worst;
}

}  // namespace tdspec
