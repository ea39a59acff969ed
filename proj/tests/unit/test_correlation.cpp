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

#include <algorithm>
#include <cmath>
#include <random>

#include "doctest.h"
#include "support/oracles.hpp"
#include "tdspec/correlation.hpp"
#include "tdspec/peaks.hpp"

using namespace tdspec;
using tdspec::testing::max_abs;

namespace {

ThreeLevelParams drive(double r) {
  ThreeLevelParams p;
  p.rabi = {r, r};
  return p;
}

double most_negative_ratio(const SpectrumTrace& s) {
  double lo = 0.0;
  double hi = 0.0;
  for (const auto& p : s.points) {
    lo = std::min(lo, p.intensity);
    hi = std::max(hi, p.intensity);
  }
  return -lo / hi;
}

}  // namespace

TEST_CASE("DetectionOperator components") {
  const DetectionOperator det = DetectionOperator::three_level(ThreeLevelParams{});
  REQUIRE(det.components().size() == 2);
  CHECK(det.components()[0].frequency == 4.0);
  CHECK(det.components()[1].frequency == 8.0);
  CHECK(std::abs(det.components()[0].op.matrix()(0, 1) - 0.1) < 1e-15);
  CHECK(std::abs(det.components()[1].op.matrix()(0, 2) - 0.1) < 1e-15);
  CHECK(max_abs(det.total().matrix() - (det.components()[0].op + det.components()[1].op).matrix()) == 0.0);

  // equal frequencies merge
  const HilbertSpace s{3};
  const DetectionOperator merged({{Operator::outer(s, 0, 1), 1.0}, {Operator::outer(s, 0, 2), 1.0}});
  CHECK(merged.components().size() == 1);
  CHECK_THROWS_AS(DetectionOperator(std::vector<FrequencyComponent>{}), std::invalid_argument);
}

TEST_CASE("qrt_two_time: trivial operators and tau = 0") {
  std::mt19937_64 rng(21);
  const LindbladModel m = tdspec::testing::random_model(3, rng);
  const DensityMatrix rho0 = tdspec::testing::random_density(m.space(), rng);
  const Operator id = Operator::identity(m.space());
  const std::vector<double> taus{0.0, 0.5, 1.3};
  for (cd v : qrt_two_time(m, rho0, id, id, 0.8, taus)) CHECK(std::abs(v - 1.0) < 1e-10);

  const Operator a(m.space(), tdspec::testing::random_matrix(3, rng));
  const Operator b(m.space(), tdspec::testing::random_matrix(3, rng));
  const Matrix g = tdspec::testing::liouvillian_from_rhs(m);
  const Matrix rho_t = tdspec::testing::propagate_exact(g, rho0.matrix(), 0.8);
  const cd direct = (b.matrix() * a.matrix() * rho_t).trace();
  CHECK(std::abs(qrt_two_time(m, rho0, a, b, 0.8, {0.0}, 0.005).front() - direct) < 1e-8);
}

TEST_CASE("qrt_two_time: decaying qubit has the analytic correlation") {
  const double gamma = 0.5;
  const LindbladModel m = tdspec::testing::qubit_decay(gamma);
  const HilbertSpace s{2};
  const Operator lower = Operator::outer(s, 0, 1);
  const Operator raise = Operator::outer(s, 1, 0);
  const double t = 1.5;
  std::vector<double> taus;
  for (int k = 0; k <= 10; ++k) taus.push_back(0.4 * k);
  const auto v = qrt_two_time(m, DensityMatrix::basis(s, 1), lower, raise, t, taus);
  for (std::size_t k = 0; k < taus.size(); ++k) {
    const double exact = std::exp(-gamma * t) * std::exp(-0.5 * gamma * taus[k]);
    CHECK(std::abs(v[k] - exact) < 1e-9);
  }
}

// Random generators here have norms of a few units, so the step is finer than
// the default used for the physical model.
TEST_CASE("qrt_two_time and qrt_sandwich against matrix-exponential oracle") {
  std::mt19937_64 rng(33);
  for (int trial = 0; trial < 3; ++trial) {
    const LindbladModel m = tdspec::testing::random_model(3, rng);
    const DensityMatrix rho0 = tdspec::testing::random_density(m.space(), rng);
    const Matrix o1 = tdspec::testing::random_matrix(3, rng);
    const Matrix o2 = tdspec::testing::random_matrix(3, rng);
    const Matrix o3 = tdspec::testing::random_matrix(3, rng);
    const double t = 0.7;
    const std::vector<double> taus{0.0, 0.3, 1.1, 2.0};
    const double dt = 0.005;
    const auto two = qrt_two_time(m, rho0, Operator(m.space(), o1), Operator(m.space(), o2), t, taus, dt);
    const auto sw = qrt_sandwich(m, rho0, Operator(m.space(), o1), Operator(m.space(), o2),
                                 Operator(m.space(), o3), t, taus, dt);
    for (std::size_t k = 0; k < taus.size(); ++k) {
      CHECK(std::abs(two[k] - tdspec::testing::two_time_oracle(m, rho0.matrix(), o1, o2, t, taus[k])) < 1e-6);
      CHECK(std::abs(sw[k] - tdspec::testing::sandwich_oracle(m, rho0.matrix(), o1, o2, o3, t, taus[k])) < 1e-6);
    }
  }
}

TEST_CASE("qrt_sandwich with identity in the middle is <O1 O3>") {
  std::mt19937_64 rng(8);
  const LindbladModel m = tdspec::testing::random_model(3, rng);
  const DensityMatrix rho0 = tdspec::testing::random_density(m.space(), rng);
  const Operator o1(m.space(), tdspec::testing::random_matrix(3, rng));
  const Operator o3(m.space(), tdspec::testing::random_matrix(3, rng));
  const Operator id = Operator::identity(m.space());
  const auto v = qrt_sandwich(m, rho0, o1, id, o3, 0.0, {0.0, 0.9});
  const cd expected = (o1.matrix() * o3.matrix() * rho0.matrix()).trace();
  CHECK(std::abs(v[0] - expected) < 1e-12);
  // trace preservation carries tau = 0 forward
  CHECK(std::abs(v[1] - expected) < 1e-9);
}

TEST_CASE("qrt rejects bad tau lists") {
  const LindbladModel m = tdspec::testing::qubit_decay(0.1);
  const HilbertSpace s{2};
  const Operator id = Operator::identity(s);
  const DensityMatrix rho = DensityMatrix::basis(s, 1);
  CHECK_THROWS_AS(qrt_two_time(m, rho, id, id, 0.0, {-0.1}), std::invalid_argument);
  CHECK_THROWS_AS(qrt_two_time(m, rho, id, id, 0.0, {0.5, 0.2}), std::invalid_argument);
  CHECK_THROWS_AS(qrt_two_time(m, rho, id, id, -1.0, {0.0}), std::invalid_argument);
}

TEST_CASE("correlation_grid matches the oracle on an 8x8 grid") {
  const LindbladModel m = three_level_model(drive(2.0));
  const DetectionOperator det = DetectionOperator::three_level(drive(2.0));
  const DensityMatrix rho0 = DensityMatrix::basis(m.space(), 1);
  const CorrelationGrid grid = correlation_grid(m, rho0, det, 1.4, 7);
  REQUIRE(grid.values.rows() == 8);
  REQUIRE(grid.values.cols() == 8);
  double worst = 0.0;
  for (int i = 0; i <= 7; ++i)
    for (int j = 0; j <= 7; ++j) {
      const cd oracle = tdspec::testing::lab_correlation_oracle(m, rho0.matrix(), det, grid.time(i), grid.time(j));
      worst = std::max(worst, std::abs(grid.values(i, j) - oracle));
    }
  CHECK(worst < 1e-6);
}

TEST_CASE("correlation_grid structure") {
  const LindbladModel m = three_level_model(drive(2.0));
  const DetectionOperator det = DetectionOperator::three_level(drive(2.0));
  const DensityMatrix rho0 = DensityMatrix::basis(m.space(), 1);
  const CorrelationGrid g1 = correlation_grid(m, rho0, det, 3.0, 30, kQrtStep, 1);

  SUBCASE("Hermitian with a real non-negative diagonal") {
    CHECK(max_abs(g1.values - g1.values.adjoint()) == 0.0);
    for (int i = 0; i <= 30; ++i) {
      CHECK(g1.values(i, i).real() >= 0.0);
      CHECK(std::abs(g1.values(i, i).imag()) < 1e-14);
    }
  }
  SUBCASE("mirrored entries equal a direct computation") {
    double worst = 0.0;
    for (int i = 0; i <= 30; i += 7)
      for (int j = i + 1; j <= 30; j += 5) {
        worst = std::max(worst, std::abs(g1.values(i, j) - lab_correlation(m, rho0, det, g1.time(i), g1.time(j))));
      }
    CHECK(worst < 1e-7);
  }
  SUBCASE("worker count does not change a single bit") {
    const CorrelationGrid g3 = correlation_grid(m, rho0, det, 3.0, 30, kQrtStep, 3);
    CHECK(g1.values == g3.values);
  }
  SUBCASE("dark source gives a zero grid") {
    const LindbladModel dark = three_level_model(drive(0.0));
    const CorrelationGrid g = correlation_grid(dark, DensityMatrix::basis(dark.space(), 0), det, 2.0, 10);
    CHECK(max_abs(g.values) == 0.0);
  }
  SUBCASE("invalid sizes") {
    CHECK_THROWS_AS(correlation_grid(m, rho0, det, 1.0, 1), std::invalid_argument);
    CHECK_THROWS_AS(correlation_grid(m, rho0, det, -1.0, 4), std::invalid_argument);
  }
}

TEST_CASE("stationary correlation and coherent lines") {
  const LindbladModel m = three_level_model(drive(2.0));
  const DetectionOperator det = DetectionOperator::three_level(drive(2.0));
  const DensityMatrix ss = steady_state(m);
  const auto g = stationary_correlation(m, det, 4.0, 0.02);
  REQUIRE(g.size() == 201);
  double g0 = 0.0;
  for (const auto& c : det.components()) g0 += expectation(ss, c.op.dagger() * c.op).real();
  CHECK(std::abs(g.front() - g0) < 1e-10);

  const auto lines = coherent_lines(m, det);
  REQUIRE(lines.size() == 2);
  for (std::size_t k = 0; k < 2; ++k) {
    CHECK(lines[k].omega == det.components()[k].frequency);
    const double w = 2.0 * M_PI * std::norm(expectation(ss, det.components()[k].op));
    CHECK(lines[k].weight == doctest::Approx(w).epsilon(1e-10));
  }
}

TEST_CASE("wk_spectrum") {
  const std::vector<double> omegas = linspace(0.0, 12.0, 601);

  SUBCASE("zero detection operator gives a zero spectrum") {
    const LindbladModel m = three_level_model(drive(2.0));
    const DetectionOperator zero(Operator::zero(m.space()));
    const SpectrumTrace s = wk_spectrum(m, zero, omegas, 50.0, 0.02);
    CHECK(s.max_intensity() == 0.0);
  }
  SUBCASE("weak drive: two lines at the transition frequencies") {
    const LindbladModel m = three_level_model(drive(0.2));
    const SpectrumTrace s = wk_spectrum(m, DetectionOperator::three_level(drive(0.2)), omegas, 200.0, 0.02);
    CHECK_NOTHROW(s.validate());
    const PeakList p = find_peaks(s);
    REQUIRE(p.size() == 2);
    CHECK(std::abs(p[0].omega - 4.0) <= 0.1);
    CHECK(std::abs(p[1].omega - 8.0) <= 0.1);
  }
  SUBCASE("unclipped negative excursions shrink as T_max grows") {
    const LindbladModel m = three_level_model(drive(2.0));
    const DetectionOperator det = DetectionOperator::three_level(drive(2.0));
    WkOptions raw;
    raw.clip = false;
    double previous = 1e300;
    for (double T : {50.0, 100.0, 200.0}) {
      const double r = most_negative_ratio(wk_spectrum(m, det, omegas, T, 0.02, raw));
      CHECK(r <= previous);
      previous = r;
    }
  }
  SUBCASE("grid errors") {
    const LindbladModel m = three_level_model(drive(0.2));
    const DetectionOperator det = DetectionOperator::three_level(drive(0.2));
    CHECK_THROWS_AS(wk_spectrum(m, det, {}, 10.0, 0.02), std::invalid_argument);
    CHECK_THROWS_AS(wk_spectrum(m, det, {1.0, 1.0}, 10.0, 0.02), std::invalid_argument);
    CHECK_THROWS_AS(wk_spectrum(m, det, omegas, 10.0, 0.03), std::invalid_argument);
  }
}

TEST_CASE("SpectrumTrace helpers") {
  SpectrumTrace s;
  s.points = {{0.0, 1.0}, {1.0, 4.0}, {2.0, 2.0}};
  CHECK(s.max_intensity() == 4.0);
  const SpectrumTrace u = s.unit_max();
  CHECK(u.normalization == Normalization::unit_max);
  CHECK(u.points[1].intensity == 1.0);
  CHECK(u.points[0].intensity == 0.25);
  s.points[2].omega = 0.5;
  CHECK_THROWS_AS(s.validate(), std::invalid_argument);
  s.points[2] = {2.0, -1.0};
  CHECK_THROWS_AS(s.validate(), std::invalid_argument);
  CHECK(normalization_from_string(to_string(Normalization::unit_max)) == Normalization::unit_max);
  CHECK_THROWS_AS(normalization_from_string("peak"), std::invalid_argument);
}

TEST_CASE("linspace") {
  const auto v = linspace(0.0, 12.0, 128);
  REQUIRE(v.size() == 128);
  CHECK(v.front() == 0.0);
  CHECK(v.back() == 12.0);
  CHECK(v[1] == doctest::Approx(12.0 / 127));
  CHECK(linspace(3.0, 5.0, 1) == std::vector<double>{3.0});
}
