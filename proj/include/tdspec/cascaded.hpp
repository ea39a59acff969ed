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

#include <cstdint>
#include <vector>

#include "tdspec/correlation.hpp"
#include "tdspec/lindblad.hpp"

namespace tdspec {

/// Source (index 0, dim 3) cascaded into a two-level analyzer (index 1, dim 2,
/// |g> = 0, |e> = 1).
struct CascadedParams {
  ThreeLevelParams source;
  double omega_b = 4.0;
  double p = 0.005;
  double gamma_b = 0.001;

  void validate() const;
};

/// Joint model in a frame rotating at the source's bare energies with the
/// analyzer left at its lab frequency. The source-analyzer cross terms carry
/// the transition phases e^{+-i (w_k - w_1) t}.
struct CascadedModel {
  CascadedParams params;
  LindbladModel model;
  /// I (x) |e><e|
  Operator analyzer_excited;

  /// |level><level| (x) |g><g|, level 0-based.
  DensityMatrix initial_state(int source_level) const;
  StateVector initial_vector(int source_level) const;
};

CascadedModel build_cascaded(const CascadedParams& cp);

/// Source-analyzer coupling constants sqrt(Gamma_k p * Gamma_B / 2), k = 1, 2.
std::array<double, 2> cascade_couplings(const CascadedParams& cp);

struct McwfSettings {
  double T = 200.0;
  double dt = 0.01;
  double record_dt = 1.0;

  void validate() const;
};

struct ExcitationRecord {
  double omega_b = 0.0;
  std::vector<double> times;
  std::vector<double> p_excited;
  std::vector<double> std_error;

  void validate() const;
};

/// Aborts a trajectory whose per-step jump probability exceeds this.
inline constexpr double kMaxJumpProbability = 0.1;

/// First-order quantum-jump trajectory of `model`, recording <psi|observable|psi>
/// every record_dt. std_error is zero.
ExcitationRecord mcwf_trajectory(const LindbladModel& model, const StateVector& psi0,
                                 const Operator& observable, const McwfSettings& settings,
                                 std::uint64_t seed);

ExcitationRecord mcwf_trajectory(const CascadedModel& cm, const StateVector& psi0,
                                 const McwfSettings& settings, std::uint64_t seed);

/// Seed of trajectory `traj_index` at analyzer frequency `freq_index`.
std::uint64_t derive_seed(std::uint64_t base_seed, std::size_t freq_index, std::size_t traj_index);

/// Mean and standard error (sample std / sqrt(n)) over n_traj trajectories with
/// derived seeds. The reduction runs in trajectory order, so the result does
/// not depend on `workers`.
ExcitationRecord ensemble_excitation(const CascadedModel& cm, const StateVector& psi0,
                                     const McwfSettings& settings, int n_traj,
                                     std::uint64_t base_seed, std::size_t freq_index,
                                     int workers = 1);

/// Same observable from the joint master equation (std_error zero).
ExcitationRecord master_equation_excitation(const CascadedModel& cm, const DensityMatrix& rho0,
                                            const McwfSettings& settings);

enum class AnalyzerMethod { master_equation, mcwf };

std::string to_string(AnalyzerMethod m);
AnalyzerMethod analyzer_method_from_string(const std::string& s);

struct AnalyzerBankConfig {
  std::vector<double> omega_list = default_band();
  int n_traj = 300;
  double T = 200.0;
  double dt = 0.01;
  double record_dt = 1.0;
  std::uint64_t base_seed = 1;

  /// 128 analyzer frequencies uniform over [0, 12].
  static std::vector<double> default_band();
  void validate() const;
  McwfSettings settings() const { return {T, dt, record_dt}; }
};

/// One record per analyzer frequency, in omega_list order. `source_level` is
/// the 0-based initial source level (analyzer starts in |g>).
std::vector<ExcitationRecord> run_analyzer_bank(const CascadedParams& base,
                                                const AnalyzerBankConfig& cfg,
                                                AnalyzerMethod method, int source_level,
                                                int workers = 1);

/// For each readout time, the trace omega_b -> P_e(t).
std::vector<SpectrumTrace> analyzer_spectrum(const std::vector<ExcitationRecord>& records,
                                             const std::vector<double>& readout_times,
                                             Normalization normalization = Normalization::unit_max);

}  // namespace tdspec
