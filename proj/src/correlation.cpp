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

#include "tdspec/correlation.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "tdspec/parallel.hpp"

namespace tdspec {

namespace {

// Row vector a with a . vec(X) = Tr[A X] for row-major vec.
Vector trace_weights(const Matrix& a) { return vectorize(a.transpose()); }

cd trace_with(const Vector& weights, const Vector& x) { return weights.cwiseProduct(x).sum(); }

Matrix require_superoperator(const LindbladModel& model, const char* who) {
  if (!model.is_time_independent()) {
    throw std::invalid_argument(std::string(who) + ": model must be time independent");
  }
  return build_superoperator(model);
}

Matrix step_propagator(const Matrix& g, double span, double dt) {
  const auto [n, h] = rk4_steps(span, dt);
  if (n == 0) return Matrix::Identity(g.rows(), g.cols());
  return rk4_propagator(g, h, static_cast<int>(n));
}

Vector state_at(const Matrix& g, const DensityMatrix& rho0, double t, double dt) {
  if (t < 0.0) throw std::invalid_argument("correlation time must be >= 0");
  return step_propagator(g, t, dt) * vectorize(rho0.matrix());
}

// Advances x0 through ascending taus and records Tr[A x(tau)].
std::vector<cd> march(const Matrix& g, Vector x, const Vector& weights,
                      const std::vector<double>& taus, double dt) {
  std::vector<cd> out;
  out.reserve(taus.size());
  double now = 0.0;
  double last_span = -1.0;
  Matrix prop;
  for (double tau : taus) {
    if (tau < now) throw std::invalid_argument("tau values must be >= 0 and ascending");
    const double span = tau - now;
    if (span > 0.0) {
      if (span != last_span) {
        prop = step_propagator(g, span, dt);
        last_span = span;
      }
      x = prop * x;
    }
    now = tau;
    out.push_back(trace_with(weights, x));
  }
  return out;
}

std::size_t count_steps(double total, double step, const char* what) {
  if (!(step > 0.0)) throw std::invalid_argument(std::string(what) + ": step must be > 0");
  if (!(total > 0.0)) throw std::invalid_argument(std::string(what) + ": span must be > 0");
  const double ratio = total / step;
  const double rounded = std::round(ratio);
  if (std::abs(ratio - rounded) > 1e-9 * std::max(1.0, ratio)) {
    std::ostringstream os;
    os << what << ": span " << total << " is not a multiple of step " << step;
    throw std::invalid_argument(os.str());
  }
  return static_cast<std::size_t>(rounded);
}

}  // namespace

DetectionOperator::DetectionOperator(Operator op)
    : DetectionOperator(std::vector<FrequencyComponent>{{std::move(op), 0.0}}) {}

DetectionOperator::DetectionOperator(std::vector<FrequencyComponent> components) {
  if (components.empty()) throw std::invalid_argument("DetectionOperator needs a component");
  // Components at a shared frequency interfere; keep one summed entry per frequency.
  const HilbertSpace space = components.front().op.space();
  for (auto& c : components) {
    require_same_space(space, c.op.space(), "DetectionOperator");
    auto it = std::find_if(components_.begin(), components_.end(),
                           [&](const FrequencyComponent& k) { return k.frequency == c.frequency; });
    if (it == components_.end()) {
      components_.push_back(std::move(c));
    } else {
      it->op += c.op;
    }
  }
}

DetectionOperator DetectionOperator::three_level(const ThreeLevelParams& params) {
  params.validate();
  const HilbertSpace space{3};
  return DetectionOperator(std::vector<FrequencyComponent>{
      {Operator::outer(space, 0, 1) * cd(params.decays[0]), params.energies[1] - params.energies[0]},
      {Operator::outer(space, 0, 2) * cd(params.decays[1]), params.energies[2] - params.energies[0]},
  });
}

Operator DetectionOperator::total() const {
  Operator sum = Operator::zero(space());
  for (const auto& c : components_) sum += c.op;
  return sum;
}

std::string to_string(Normalization n) { return n == Normalization::raw ? "raw" : "unit_max"; }

Normalization normalization_from_string(const std::string& s) {
  if (s == "raw") return Normalization::raw;
  if (s == "unit_max") return Normalization::unit_max;
  throw std::invalid_argument("unknown normalization '" + s + "'");
}

void SpectrumTrace::validate() const {
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (!std::isfinite(points[i].omega) || !std::isfinite(points[i].intensity)) {
      throw std::invalid_argument("SpectrumTrace: non-finite point");
    }
    if (points[i].intensity < 0.0) throw std::invalid_argument("SpectrumTrace: negative intensity");
    if (i > 0 && !(points[i].omega > points[i - 1].omega)) {
      throw std::invalid_argument("SpectrumTrace: omegas must strictly increase");
    }
  }
}

double SpectrumTrace::max_intensity() const {
  double m = 0.0;
  for (const auto& p : points) m = std::max(m, p.intensity);
  return m;
}

SpectrumTrace SpectrumTrace::unit_max() const {
  SpectrumTrace out = *this;
  out.normalization = Normalization::unit_max;
  const double m = max_intensity();
  if (m > 0.0) {
    for (auto& p : out.points) p.intensity /= m;
  }
  return out;
}

std::vector<double> SpectrumTrace::omegas() const {
  std::vector<double> v;
  for (const auto& p : points) v.push_back(p.omega);
  return v;
}

std::vector<double> SpectrumTrace::intensities() const {
  std::vector<double> v;
  for (const auto& p : points) v.push_back(p.intensity);
  return v;
}

std::vector<cd> qrt_two_time(const LindbladModel& model, const DensityMatrix& rho0,
                             const Operator& o1, const Operator& o2, double t,
                             const std::vector<double>& taus, double dt) {
  require_same_space(model.space(), o1.space(), "qrt_two_time");
  require_same_space(model.space(), o2.space(), "qrt_two_time");
  const Matrix g = require_superoperator(model, "qrt_two_time");
  const int d = model.space().total();
  const Matrix rho_t = unvectorize(state_at(g, rho0, t, dt), d);
  return march(g, vectorize(o1.matrix() * rho_t), trace_weights(o2.matrix()), taus, dt);
}

std::vector<cd> qrt_sandwich(const LindbladModel& model, const DensityMatrix& rho0,
                             const Operator& o1, const Operator& o2, const Operator& o3,
                             double t, const std::vector<double>& taus, double dt) {
  for (const Operator* o : {&o1, &o2, &o3}) require_same_space(model.space(), o->space(), "qrt_sandwich");
  const Matrix g = require_superoperator(model, "qrt_sandwich");
  const int d = model.space().total();
  const Matrix rho_t = unvectorize(state_at(g, rho0, t, dt), d);
  return march(g, vectorize(o3.matrix() * rho_t * o1.matrix()), trace_weights(o2.matrix()), taus, dt);
}

cd lab_correlation(const LindbladModel& model, const DensityMatrix& rho0,
                   const DetectionOperator& detector, double t1, double t2, double dt) {
  require_same_space(model.space(), detector.space(), "lab_correlation");
  const Matrix g = require_superoperator(model, "lab_correlation");
  const int d = model.space().total();
  const double early = std::min(t1, t2);
  const Matrix rho = unvectorize(state_at(g, rho0, early, dt), d);
  const Matrix prop = step_propagator(g, std::abs(t1 - t2), dt);
  cd sum = 0.0;
  for (const auto& j : detector.components()) {
    for (const auto& k : detector.components()) {
      const Matrix oj_dag = j.op.matrix().adjoint();
      const Matrix& ok = k.op.matrix();
      cd value;
      if (t1 >= t2) {
        // <Oj^dag(t2 + tau) Ok(t2)> = Tr[Oj^dag e^{L tau}(Ok rho)]
        value = trace_with(trace_weights(oj_dag), prop * vectorize(ok * rho));
      } else {
        // <Oj^dag(t1) Ok(t1 + tau)> = Tr[Ok e^{L tau}(rho Oj^dag)]
        value = trace_with(trace_weights(ok), prop * vectorize(rho * oj_dag));
      }
      sum += std::polar(1.0, j.frequency * t1 - k.frequency * t2) * value;
    }
  }
  return sum;
}

std::vector<cd> stationary_correlation(const LindbladModel& model,
                                       const DetectionOperator& detector, double T_max,
                                       double dtau, double dt) {
  require_same_space(model.space(), detector.space(), "stationary_correlation");
  const std::size_t m = count_steps(T_max, dtau, "stationary_correlation");
  const Matrix g = require_superoperator(model, "stationary_correlation");
  const Matrix rho = steady_state(model).matrix();
  const Matrix prop = step_propagator(g, dtau, dt);
  std::vector<cd> out(m + 1, cd(0.0));
  for (const auto& k : detector.components()) {
    const Vector w = trace_weights(k.op.matrix());
    Vector x = vectorize(rho * k.op.matrix().adjoint());
    for (std::size_t n = 0; n <= m; ++n) {
      if (n > 0) x = prop * x;
      const double tau = static_cast<double>(n) * dtau;
      out[n] += std::polar(1.0, -k.frequency * tau) * trace_with(w, x);
    }
  }
  return out;
}

std::vector<CoherentLine> coherent_lines(const LindbladModel& model,
                                         const DetectionOperator& detector) {
  require_same_space(model.space(), detector.space(), "coherent_lines");
  const DensityMatrix rho = steady_state(model);
  std::vector<CoherentLine> lines;
  for (const auto& k : detector.components()) {
    const double amp = std::abs(expectation(rho, k.op));
    lines.push_back({k.frequency, 2.0 * std::numbers::pi * amp * amp});
  }
  std::sort(lines.begin(), lines.end(),
            [](const CoherentLine& a, const CoherentLine& b) { return a.omega < b.omega; });
  return lines;
}

SpectrumTrace wk_spectrum(const LindbladModel& model, const DetectionOperator& detector,
                          const std::vector<double>& omega_grid, double T_max, double dtau,
                          const WkOptions& options) {
  require_same_space(model.space(), detector.space(), "wk_spectrum");
  const std::size_t m = count_steps(T_max, dtau, "wk_spectrum");
  if (omega_grid.empty()) throw std::invalid_argument("wk_spectrum: empty omega grid");
  for (std::size_t i = 1; i < omega_grid.size(); ++i) {
    if (!(omega_grid[i] > omega_grid[i - 1])) throw std::invalid_argument("wk_spectrum: omegas must increase");
  }
  const double rate = options.taper_rate < 0.0 ? 4.0 / T_max : options.taper_rate;

  const Matrix g = require_superoperator(model, "wk_spectrum");
  const Matrix rho = steady_state(model).matrix();
  const Matrix prop = step_propagator(g, dtau, options.dt);

  // Windowed, trapezoid-weighted correlation samples.
  std::vector<cd> samples(m + 1, cd(0.0));
  for (const auto& k : detector.components()) {
    const Vector w = trace_weights(k.op.matrix());
    Vector x = vectorize(rho * k.op.matrix().adjoint());
    const cd mean = (rho * k.op.matrix()).trace();
    const double coherent = options.subtract_coherent ? std::norm(mean) : 0.0;
    for (std::size_t n = 0; n <= m; ++n) {
      if (n > 0) x = prop * x;
      const double tau = static_cast<double>(n) * dtau;
      samples[n] += std::polar(1.0, -k.frequency * tau) * (trace_with(w, x) - coherent);
    }
  }
  for (std::size_t n = 0; n <= m; ++n) {
    const double tau = static_cast<double>(n) * dtau;
    const double trap = (n == 0 || n == m) ? 0.5 : 1.0;
    samples[n] *= trap * dtau * std::exp(-rate * tau);
  }

  SpectrumTrace trace;
  trace.readout_time = T_max;
  trace.normalization = Normalization::raw;
  trace.points.reserve(omega_grid.size());
  for (double omega : omega_grid) {
    // e^{i omega tau_n} by recurrence, re-anchored periodically.
    const cd step = std::polar(1.0, omega * dtau);
    cd ph = 1.0;
    cd acc = 0.0;
    for (std::size_t n = 0; n <= m; ++n) {
      if (n % 256 == 0) ph = std::polar(1.0, omega * dtau * static_cast<double>(n));
      acc += samples[n] * ph;
      ph *= step;
    }
    const double s = 2.0 * acc.real();
    trace.points.push_back({omega, options.clip ? std::max(0.0, s) : s});
  }
  if (options.clip) trace.validate();
  return trace;
}

CorrelationGrid correlation_grid(const LindbladModel& model, const DensityMatrix& rho0,
                                 const DetectionOperator& detector, double T, int N, double dt,
                                 int workers) {
  require_same_space(model.space(), detector.space(), "correlation_grid");
  if (N < 2) throw std::invalid_argument("correlation_grid: N must be >= 2");
  if (!(T > 0.0)) throw std::invalid_argument("correlation_grid: T must be > 0");
  const Matrix g = require_superoperator(model, "correlation_grid");
  const int d = model.space().total();
  const double step = T / N;
  const Matrix prop = step_propagator(g, step, dt);

  std::vector<Matrix> rho(N + 1);
  Vector v = vectorize(rho0.matrix());
  for (int n = 0; n <= N; ++n) {
    if (n > 0) v = prop * v;
    rho[n] = unvectorize(v, d);
  }

  const auto& comps = detector.components();
  std::vector<Vector> weights;
  for (const auto& j : comps) weights.push_back(trace_weights(j.op.matrix().adjoint()));

  CorrelationGrid grid;
  grid.T = T;
  grid.N = N;
  grid.values = Matrix::Zero(N + 1, N + 1);
  // Column n: seed Ok rho(t_n) and march to every t_m >= t_n.
  parallel_for(static_cast<std::size_t>(N + 1), workers, [&](std::size_t col) {
    const int n = static_cast<int>(col);
    const double t2 = n * step;
    for (const auto& k : comps) {
      Vector x = vectorize(k.op.matrix() * rho[n]);
      for (int m = n; m <= N; ++m) {
        if (m > n) x = prop * x;
        const double t1 = m * step;
        cd sum = 0.0;
        for (std::size_t j = 0; j < comps.size(); ++j) {
          sum += std::polar(1.0, comps[j].frequency * t1) * trace_with(weights[j], x);
        }
        grid.values(m, n) += std::polar(1.0, -k.frequency * t2) * sum;
      }
    }
  });
  for (int m = 0; m <= N; ++m) {
    grid.values(m, m) = grid.values(m, m).real();  // <O^dag O>, imaginary part is round-off
    for (int n = m + 1; n <= N; ++n) grid.values(m, n) = std::conj(grid.values(n, m));
  }
  return grid;
}

std::vector<double> linspace(double lo, double hi, int count) {
  if (count < 1) throw std::invalid_argument("linspace: count must be >= 1");
  std::vector<double> out(count);
  if (count == 1) {
    out[0] = lo;
    return out;
  }
  const double step = (hi - lo) / (count - 1);
  for (int i = 0; i < count; ++i) out[i] = lo + step * i;
  out.back() = hi;
  return out;
}

}  // namespace tdspec
