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

#include "tdspec/cascaded.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <sstream>

#include "tdspec/parallel.hpp"

namespace tdspec {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

// Uniform in [0, 1) from the top 53 bits; fixed across standard libraries.
double uniform01(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

struct RecordPlan {
  long steps;
  double h;
  long stride;
  long records;
};

RecordPlan plan_records(const McwfSettings& s) {
  s.validate();
  const auto [n, h] = rk4_steps(s.T, s.dt);
  const double stride = s.record_dt / h;
  const long k = std::lround(stride);
  if (k < 1 || std::abs(stride - static_cast<double>(k)) > 1e-6 || n % k != 0) {
    std::ostringstream os;
    os << "record_dt " << s.record_dt << " is not a multiple of the step " << h
       << " dividing T = " << s.T;
    throw std::invalid_argument(os.str());
  }
  return {n, h, k, n / k + 1};
}

double clamp01(double x) { return std::min(1.0, std::max(0.0, x)); }

}  // namespace

void CascadedParams::validate() const {
  source.validate();
  if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("cascaded.p must lie in [0, 1]");
  if (!(gamma_b > 0.0) || !std::isfinite(gamma_b)) {
    throw std::invalid_argument("cascaded.gamma_b must be > 0");
  }
  if (!std::isfinite(omega_b)) throw std::invalid_argument("cascaded.omega_b must be finite");
}

std::array<double, 2> cascade_couplings(const CascadedParams& cp) {
  return {std::sqrt(cp.source.decays[0] * cp.p * 0.5 * cp.gamma_b),
          std::sqrt(cp.source.decays[1] * cp.p * 0.5 * cp.gamma_b)};
}

DensityMatrix CascadedModel::initial_state(int source_level) const {
  if (source_level < 0 || source_level > 2) throw std::invalid_argument("source level out of range");
  return DensityMatrix::basis(model.space(), source_level * 2);
}

StateVector CascadedModel::initial_vector(int source_level) const {
  if (source_level < 0 || source_level > 2) throw std::invalid_argument("source level out of range");
  return StateVector::basis(model.space(), source_level * 2);
}

CascadedModel build_cascaded(const CascadedParams& cp) {
  cp.validate();
  const HilbertSpace a{3};
  const HilbertSpace b{2};
  const HilbertSpace joint{3, 2};
  const Operator id_a = Operator::identity(a);
  const Operator id_b = Operator::identity(b);
  const Operator sigma_minus = Operator::outer(b, 0, 1);
  const Operator excited = Operator::outer(b, 1, 1);

  const auto& s = cp.source;
  const Operator a12 = Operator::outer(a, 0, 1);
  const Operator a13 = Operator::outer(a, 0, 2);
  const Operator a23 = Operator::outer(a, 1, 2);
  const double nu1 = s.energies[1] - s.energies[0];
  const double nu2 = s.energies[2] - s.energies[0];

  // H_A (resonant drives, static) + H_B (analyzer at its lab frequency).
  const Operator h_a = (a12 + a12.dagger()) * cd(0.5 * s.rabi[0]) + (a23 + a23.dagger()) * cd(0.5 * s.rabi[1]);
  const Operator h_static = tensor(h_a, id_b) + tensor(id_a, excited) * cd(cp.omega_b);

  // H_C = (i/2) kappa_k (a_k^dag sigma_- e^{i nu_k t} - h.c.)
  const auto kappa = cascade_couplings(cp);
  std::vector<DriveTerm> drives;
  if (cp.p > 0.0) {
    drives.push_back({tensor(a12.dagger(), sigma_minus) * cd(0.0, 1.0), 0.5 * kappa[0], nu1});
    drives.push_back({tensor(a13.dagger(), sigma_minus) * cd(0.0, 1.0), 0.5 * kappa[1], nu2});
  }

  const Operator analyzer_decay = tensor(id_a, sigma_minus) * cd(std::sqrt(0.5 * cp.gamma_b));
  std::vector<CollapseOperator> collapse;
  collapse.emplace_back(tensor(a12, id_b) * cd(std::sqrt(s.decays[0] * (1.0 - cp.p))));
  collapse.emplace_back(tensor(a13, id_b) * cd(std::sqrt(s.decays[1] * (1.0 - cp.p))));
  collapse.emplace_back(std::vector<PhasedPart>{
      {tensor(a12, id_b) * cd(std::sqrt(s.decays[0] * cp.p)), nu1}, {analyzer_decay, 0.0}});
  collapse.emplace_back(std::vector<PhasedPart>{
      {tensor(a13, id_b) * cd(std::sqrt(s.decays[1] * cp.p)), nu2}, {analyzer_decay, 0.0}});

  return CascadedModel{cp, LindbladModel(h_static, std::move(drives), std::move(collapse), Frame::rotating),
                       tensor(id_a, excited)};
}

void McwfSettings::validate() const {
  if (!(T > 0.0)) throw std::invalid_argument("T must be > 0");
  if (!(dt > 0.0)) throw std::invalid_argument("dt must be > 0");
  if (!(record_dt > 0.0)) throw std::invalid_argument("record_dt must be > 0");
}

void ExcitationRecord::validate() const {
  if (times.size() != p_excited.size() || times.size() != std_error.size()) {
    throw std::invalid_argument("ExcitationRecord: column lengths differ");
  }
  for (double v : p_excited) {
    if (!(v >= 0.0 && v <= 1.0)) throw std::invalid_argument("ExcitationRecord: p_excited outside [0, 1]");
  }
}

ExcitationRecord mcwf_trajectory(const LindbladModel& model, const StateVector& psi0,
                                 const Operator& observable, const McwfSettings& settings,
                                 std::uint64_t seed) {
  require_same_space(model.space(), psi0.space(), "mcwf_trajectory");
  require_same_space(model.space(), observable.space(), "mcwf_trajectory");
  const RecordPlan plan = plan_records(settings);
  const LindbladGenerator gen(model);
  const int d = gen.dim();
  const int channels = gen.channels();
  const Matrix& obs = observable.matrix();
  std::mt19937_64 rng(seed);

  ExcitationRecord rec;
  rec.times.reserve(plan.records);
  rec.p_excited.reserve(plan.records);
  auto record = [&](long step, const Vector& psi) {
    rec.times.push_back(static_cast<double>(step / plan.stride) * settings.record_dt);
    rec.p_excited.push_back(clamp01(psi.dot(obs * psi).real()));
  };

  Vector psi = psi0.amplitudes();
  std::vector<Vector> jumped(channels, Vector(d));
  std::vector<double> dp(channels);
  Matrix k(d, d);
  Vector k1(d), k2(d), k3(d), k4(d), tmp(d);
  const cd minus_i(0.0, -1.0);
  const double h = plan.h;

  record(0, psi);
  for (long s = 0; s < plan.steps; ++s) {
    const double t = static_cast<double>(s) * h;
    double total = 0.0;
    for (int c = 0; c < channels; ++c) {
      gen.apply_collapse(c, t, psi, jumped[c]);
      dp[c] = h * jumped[c].squaredNorm();
      total += dp[c];
    }
    if (total > kMaxJumpProbability) {
      std::ostringstream os;
      os << "mcwf: jump probability " << total << " per step at t=" << t << " exceeds "
         << kMaxJumpProbability << "; reduce dt";
      throw std::runtime_error(os.str());
    }
    const double r = uniform01(rng);
    if (r < total) {
      int c = 0;
      double acc = dp[0];
      while (c + 1 < channels && r >= acc) acc += dp[++c];
      psi = jumped[c];
    } else {
      gen.effective_hamiltonian(t, k);
      k1.noalias() = minus_i * (k * psi);
      gen.effective_hamiltonian(t + 0.5 * h, k);
      tmp = psi + (0.5 * h) * k1;
      k2.noalias() = minus_i * (k * tmp);
      tmp = psi + (0.5 * h) * k2;
      k3.noalias() = minus_i * (k * tmp);
      gen.effective_hamiltonian(t + h, k);
      tmp = psi + h * k3;
      k4.noalias() = minus_i * (k * tmp);
      psi += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
    const double norm = psi.norm();
    if (!(norm > 0.0) || !std::isfinite(norm)) throw InvariantViolation("mcwf: state collapsed to zero");
    psi /= norm;
    if ((s + 1) % plan.stride == 0) record(s + 1, psi);
  }
  rec.std_error.assign(rec.times.size(), 0.0);
  return rec;
}

ExcitationRecord mcwf_trajectory(const CascadedModel& cm, const StateVector& psi0,
                                 const McwfSettings& settings, std::uint64_t seed) {
  ExcitationRecord rec = mcwf_trajectory(cm.model, psi0, cm.analyzer_excited, settings, seed);
  rec.omega_b = cm.params.omega_b;
  return rec;
}

std::uint64_t derive_seed(std::uint64_t base_seed, std::size_t freq_index, std::size_t traj_index) {
  std::uint64_t s = splitmix64(base_seed);
  s = splitmix64(s ^ (0xD1B54A32D192ED03ULL * (static_cast<std::uint64_t>(freq_index) + 1)));
  return splitmix64(s ^ (0x8CB92BA72F3D8DD7ULL * (static_cast<std::uint64_t>(traj_index) + 1)));
}

ExcitationRecord ensemble_excitation(const CascadedModel& cm, const StateVector& psi0,
                                     const McwfSettings& settings, int n_traj,
                                     std::uint64_t base_seed, std::size_t freq_index, int workers) {
  if (n_traj < 1) throw std::invalid_argument("n_traj must be >= 1");
  std::vector<ExcitationRecord> runs(n_traj);
  parallel_for(static_cast<std::size_t>(n_traj), workers, [&](std::size_t j) {
    runs[j] = mcwf_trajectory(cm, psi0, settings, derive_seed(base_seed, freq_index, j));
  });

  ExcitationRecord out;
  out.omega_b = cm.params.omega_b;
  out.times = runs.front().times;
  const std::size_t m = out.times.size();
  out.p_excited.assign(m, 0.0);
  out.std_error.assign(m, 0.0);
  for (std::size_t i = 0; i < m; ++i) {
    double mean = 0.0;
    for (const auto& r : runs) mean += r.p_excited[i];
    mean /= n_traj;
    double ss = 0.0;
    for (const auto& r : runs) ss += (r.p_excited[i] - mean) * (r.p_excited[i] - mean);
    out.p_excited[i] = clamp01(mean);
    out.std_error[i] = n_traj > 1 ? std::sqrt(ss / (n_traj - 1)) / std::sqrt(static_cast<double>(n_traj)) : 0.0;
  }
  return out;
}

ExcitationRecord master_equation_excitation(const CascadedModel& cm, const DensityMatrix& rho0,
                                            const McwfSettings& settings) {
  const RecordPlan plan = plan_records(settings);
  EvolveOptions opts;
  opts.store_every = static_cast<int>(plan.stride);
  const Trajectory traj = evolve(cm.model, rho0, 0.0, settings.T, settings.dt, opts);
  ExcitationRecord rec;
  rec.omega_b = cm.params.omega_b;
  for (std::size_t i = 0; i < traj.states.size(); ++i) {
    rec.times.push_back(static_cast<double>(i) * settings.record_dt);
    rec.p_excited.push_back(clamp01(expectation(traj.states[i], cm.analyzer_excited).real()));
  }
  rec.std_error.assign(rec.times.size(), 0.0);
  return rec;
}

std::string to_string(AnalyzerMethod m) {
  return m == AnalyzerMethod::master_equation ? "master_equation" : "mcwf";
}

AnalyzerMethod analyzer_method_from_string(const std::string& s) {
  if (s == "master_equation") return AnalyzerMethod::master_equation;
  if (s == "mcwf") return AnalyzerMethod::mcwf;
  throw std::invalid_argument("unknown analyzer method '" + s + "'");
}

std::vector<double> AnalyzerBankConfig::default_band() { return linspace(0.0, 12.0, 128); }

void AnalyzerBankConfig::validate() const {
  if (omega_list.empty()) throw std::invalid_argument("analyzer omega_list is empty");
  for (std::size_t i = 1; i < omega_list.size(); ++i) {
    if (!(omega_list[i] > omega_list[i - 1])) {
      throw std::invalid_argument("analyzer omega_list must be strictly increasing");
    }
  }
  if (n_traj < 1) throw std::invalid_argument("analyzer n_traj must be >= 1");
  settings().validate();
}

std::vector<ExcitationRecord> run_analyzer_bank(const CascadedParams& base,
                                                const AnalyzerBankConfig& cfg,
                                                AnalyzerMethod method, int source_level,
                                                int workers) {
  cfg.validate();
  const McwfSettings settings = cfg.settings();
  plan_records(settings);
  std::vector<ExcitationRecord> out(cfg.omega_list.size());
  auto model_at = [&](std::size_t i) {
    CascadedParams cp = base;
    cp.omega_b = cfg.omega_list[i];
    return build_cascaded(cp);
  };
  if (method == AnalyzerMethod::master_equation) {
    parallel_for(out.size(), workers, [&](std::size_t i) {
      const CascadedModel cm = model_at(i);
      out[i] = master_equation_excitation(cm, cm.initial_state(source_level), settings);
    });
  } else {
    for (std::size_t i = 0; i < out.size(); ++i) {
      const CascadedModel cm = model_at(i);
      out[i] = ensemble_excitation(cm, cm.initial_vector(source_level), settings, cfg.n_traj,
                                   cfg.base_seed, i, workers);
    }
  }
  return out;
}

std::vector<SpectrumTrace> analyzer_spectrum(const std::vector<ExcitationRecord>& records,
                                             const std::vector<double>& readout_times,
                                             Normalization normalization) {
  if (records.empty()) throw std::invalid_argument("analyzer_spectrum: no records");
  const auto& grid = records.front().times;
  for (const auto& r : records) {
    r.validate();
    if (r.times.size() != grid.size()) throw std::invalid_argument("analyzer_spectrum: mismatched time grids");
    for (std::size_t i = 0; i < grid.size(); ++i) {
      if (std::abs(r.times[i] - grid[i]) > 1e-9 * std::max(1.0, std::abs(grid[i]))) {
        throw std::invalid_argument("analyzer_spectrum: mismatched time grids");
      }
    }
  }
  std::vector<std::size_t> order(records.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return records[a].omega_b < records[b].omega_b; });

  std::vector<SpectrumTrace> traces;
  for (double t : readout_times) {
    auto it = std::find_if(grid.begin(), grid.end(), [&](double g) {
      return std::abs(g - t) <= 1e-9 * std::max(1.0, std::abs(t));
    });
    if (it == grid.end()) {
      std::ostringstream os;
      os << "analyzer_spectrum: readout time " << t << " is not a recorded time";
      throw std::invalid_argument(os.str());
    }
    const std::size_t idx = static_cast<std::size_t>(it - grid.begin());
    SpectrumTrace trace;
    trace.readout_time = t;
    trace.normalization = Normalization::raw;
    for (std::size_t i : order) trace.points.push_back({records[i].omega_b, records[i].p_excited[idx]});
    trace.validate();
    traces.push_back(normalization == Normalization::unit_max ? trace.unit_max() : trace);
  }
  return traces;
}

}  // namespace tdspec
