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

#include <cmath>
#include <limits>

#include "doctest.h"
#include "tdspec/peaks.hpp"

using namespace tdspec;

namespace {

SpectrumTrace from_values(const std::vector<double>& y) {
  SpectrumTrace s;
  for (std::size_t i = 0; i < y.size(); ++i) s.points.push_back({static_cast<double>(i), y[i]});
  return s;
}

SpectrumTrace lorentzians(const std::vector<std::pair<double, double>>& lines, double width) {
  SpectrumTrace s;
  for (double w : linspace(0.0, 12.0, 1201)) {
    double y = 0.0;
    for (const auto& [center, height] : lines) y += height * width * width / ((w - center) * (w - center) + width * width);
    s.points.push_back({w, y});
  }
  return s;
}

}  // namespace

TEST_CASE("single Lorentzian has one peak at its center") {
  const PeakList p = find_peaks(lorentzians({{4.0, 1.0}}, 0.1));
  REQUIRE(p.size() == 1);
  CHECK(p[0].omega == doctest::Approx(4.0));
  CHECK(p[0].intensity == doctest::Approx(1.0));
  CHECK(p[0].index == 400);
}

TEST_CASE("prominence threshold") {
  // the small line is 3% of the big one
  const SpectrumTrace s = lorentzians({{4.0, 1.0}, {8.0, 0.03}}, 0.05);
  CHECK(find_peaks(s).size() == 1);
  CHECK(find_peaks(s, 0.01).size() == 2);
  CHECK(find_peaks(s, 0.0).size() == 2);
}

TEST_CASE("prominence is measured from the higher saddle") {
  //             0  1  2  3  4  5  6  7  8
  const auto s = from_values({0, 5, 4, 4.4, 1, 10, 2, 3, 0});
  const PeakList p = find_peaks(s, 0.0);
  REQUIRE(p.size() == 4);
  CHECK(p[0].omega == 1.0);
  CHECK(p[0].prominence == doctest::Approx(4.0));
  CHECK(p[1].omega == 3.0);
  CHECK(p[1].prominence == doctest::Approx(0.4));
  CHECK(p[2].omega == 5.0);
  CHECK(p[2].prominence == doctest::Approx(10.0));
  CHECK(p[3].prominence == doctest::Approx(1.0));
  // 5% of 10 drops the 0.4 bump only
  CHECK(find_peaks(s).size() == 3);
}

TEST_CASE("plateaus resolve to their middle sample, edges are not peaks") {
  CHECK(find_peaks(from_values({0, 1, 3, 3, 3, 1, 0}), 0.0).front().index == 3);
  CHECK(find_peaks(from_values({0, 1, 3, 3, 1, 0}), 0.0).front().index == 2);
  CHECK(find_peaks(from_values({5, 4, 3, 2}), 0.0).empty());
  CHECK(find_peaks(from_values({1, 2, 3, 4}), 0.0).empty());
  CHECK(find_peaks(from_values({0, 0, 0}), 0.0).empty());
  CHECK_THROWS_AS(find_peaks(SpectrumTrace{}), std::invalid_argument);
}

TEST_CASE("top_peaks keeps the most prominent, ordered by omega") {
  const auto s = from_values({0, 5, 4, 4.5, 1, 10, 2, 3, 0});
  const PeakList top = top_peaks(find_peaks(s, 0.0), 2);
  REQUIRE(top.size() == 2);
  CHECK(top[0].omega == 1.0);
  CHECK(top[1].omega == 5.0);
  CHECK(top_peaks(top, 5).size() == 2);
}

TEST_CASE("describe and pairwise offset") {
  const PeakList a = find_peaks(lorentzians({{4.0, 1.0}, {8.0, 1.0}}, 0.1));
  const PeakList b = find_peaks(lorentzians({{4.05, 1.0}, {7.9, 1.0}}, 0.1));
  CHECK(describe(a) == "2 @ 4.00, 8.00");
  CHECK(describe(PeakList{}) == "0");
  CHECK(max_pairwise_offset(a, b) == doctest::Approx(0.1));
  CHECK(max_pairwise_offset(a, top_peaks(b, 1)) == std::numeric_limits<double>::infinity());
  CHECK(peak_omegas(a) == std::vector<double>{4.0, 8.0});
}
