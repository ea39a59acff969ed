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

#include <array>
#include <utility>
#include <vector>

#include "tdspec/quantum_core.hpp"

namespace tdspec {

enum class Frame { lab, rotating };

/// Coherent drive: amplitude * (coupling * e^{i w t} + h.c.). `coupling` is the
/// lowering part, e.g. |1><2| for the 1-2 transition.
struct DriveTerm {
  Operator coupling;
  double amplitude = 0.0;
  double phase_frequency = 0.0;
};

/// One summand op * e^{-i frequency t} of a collapse operator.
struct PhasedPart {
  Operator op;
  double frequency = 0.0;
};

/// Rate-absorbed collapse operator C(t) = sum_p op_p e^{-i f_p t}. A single part
/// (or parts sharing one frequency) is time independent up to a global phase,
/// which drops out of the dissipator.
class CollapseOperator {
 public:
  CollapseOperator(Operator op);  // NOLINT: implicit from a static operator
  explicit CollapseOperator(std::vector<PhasedPart> parts);

  const std::vector<PhasedPart>& parts() const { return parts_; }
  const HilbertSpace& space() const { return parts_.front().op.space(); }
  Operator at(double t) const;
  bool is_static() const;

 private:
  std::vector<PhasedPart> parts_;
};

class LindbladModel {
 public:
  static constexpr double kHermiticityTol = 1e-12;

  LindbladModel(Operator h_static, std::vector<DriveTerm> drives,
                std::vector<CollapseOperator> collapse_ops, Frame frame);

  const HilbertSpace& space() const { return h_static_.space(); }
  const Operator& h_static() const { return h_static_; }
  const std::vector<DriveTerm>& drives() const { return drives_; }
  const std::vector<CollapseOperator>& collapse_ops() const { return collapse_ops_; }
  Frame frame() const { return frame_; }

  bool is_time_independent() const;
  Operator hamiltonian(double t) const;

 private:
  Operator h_static_;
  std::vector<DriveTerm> drives_;
  std::vector<CollapseOperator> collapse_ops_;
  Frame frame_;
};

struct ThreeLevelParams {
  std::array<double, 3> energies{0.0, 4.0, 8.0};
  std::array<double, 2> decays{0.1, 0.1};
  std::array<double, 2> rabi{2.0, 2.0};

  /// Throws std::invalid_argument naming the offending field.
  void validate() const;
};

/// Three-level ladder driven resonantly on 1-2 and 2-3, decaying 2->1 and 3->1.
/// Levels are 0-based in code: |1> -> 0, |2> -> 1, |3> -> 2.
LindbladModel three_level_model(const ThreeLevelParams& params, Frame frame = Frame::rotating);

/// Compiled form of a model for repeated evaluation of the generator. Not
/// thread safe (keeps per-time scratch); use one instance per thread.
///
/// The model is rewritten as dX/dt = -i K(t) X + i X K(t)^dag + sum_c C_c(t) X C_c(t)^dag
/// with K = H - (i/2) sum_c C_c^dag C_c. K is kept dense as a sum of phased pieces;
/// the collapse operators are applied from their (few) nonzero entries.
class LindbladGenerator {
 public:
  explicit LindbladGenerator(const LindbladModel& model);

  int dim() const { return dim_; }
  /// out = L_t(x). Works for arbitrary (non-Hermitian) x, as needed by the QRT.
  void apply(double t, const Matrix& x, Matrix& out) const;
  Matrix effective_hamiltonian(double t) const;
  void effective_hamiltonian(double t, Matrix& out) const;
  /// Dense C_c(t) for each collapse channel.
  std::vector<Matrix> collapse_at(double t) const;
  int channels() const { return static_cast<int>(channels_.size()); }
  /// out = C_c(t) psi.
  void apply_collapse(int channel, double t, const Vector& psi, Vector& out) const;

 private:
  struct Entry {
    int row;
    int col;
    cd value;
    double frequency;
  };
  struct Channel {
    std::vector<Entry> entries;
  };

  // Refreshes K and the phased collapse entries for time t (cached per t).
  void prepare(double t) const;

  int dim_;
  std::vector<std::pair<double, Matrix>> k_pieces_;  // K(t) = sum piece * e^{i f t}
  std::vector<Channel> channels_;
  mutable Matrix k_work_, y_work_;
  mutable std::vector<std::vector<cd>> entry_values_;
  mutable double prepared_t_;
  mutable bool prepared_ = false;
};

/// -i[H(t), rho] + sum_i D[C_i(t)] rho
Operator rhs(const LindbladModel& model, const Operator& x, double t);
Operator rhs(const LindbladModel& model, const DensityMatrix& rho, double t);

struct EvolveOptions {
  /// Keep every n-th step (the first and last states are always kept).
  int store_every = 1;
  double trace_tol = 1e-9;
  double hermiticity_tol = 1e-9;
  double positivity_floor = -1e-8;
};

struct Trajectory {
  std::vector<double> times;
  std::vector<DensityMatrix> states;
  /// Worst defects seen over the stored states.
  StateDefects worst;
};

/// Fixed-step classical RK4. The step is shrunk (never grown) so that an integer
/// number of steps lands exactly on t1. Throws InvariantViolation when a stored
/// state leaves the tolerances in `options`.
Trajectory evolve(const LindbladModel& model, const DensityMatrix& rho0, double t0, double t1,
                  double dt, const EvolveOptions& options = {});

/// Number of RK4 steps and step length used by evolve() for a span.
std::pair<long, double> rk4_steps(double span, double dt);

/// Row-major vectorization: vec(rho)[i*D + j] = rho(i, j), so that
/// vec(A X B) = kron(A, B^T) vec(X). Requires a time-independent model.
Matrix build_superoperator(const LindbladModel& model);

/// Exact matrix of `substeps` RK4 steps of length `step` for dv/dt = G v.
Matrix rk4_propagator(const Matrix& generator, double step, int substeps);

class SteadyStateError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Null vector of the superoperator via SVD (threshold 1e-10 * ||G||_2).
DensityMatrix steady_state(const LindbladModel& model);

inline Vector vectorize(const Matrix& m) {
  Vector v(m.size());
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) v(i * m.cols() + j) = m(i, j);
  return v;
}

inline Matrix unvectorize(const Vector& v, int dim) {
  Matrix m(dim, dim);
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j) m(i, j) = v(i * dim + j);
  return m;
}

}  // namespace tdspec
