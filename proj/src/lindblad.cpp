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

#include "tdspec/lindblad.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <Eigen/SVD>

namespace tdspec {

namespace {

cd phase(double frequency, double t) { return std::polar(1.0, frequency * t); }

void add_piece(std::vector<std::pair<double, Matrix>>& pieces, double frequency, const Matrix& m) {
  for (auto& [f, acc] : pieces) {
    if (f == frequency) {
      acc += m;
      return;
    }
  }
  pieces.emplace_back(frequency, m);
}

}  // namespace

CollapseOperator::CollapseOperator(Operator op) : parts_{PhasedPart{std::move(op), 0.0}} {}

CollapseOperator::CollapseOperator(std::vector<PhasedPart> parts) : parts_(std::move(parts)) {
  if (parts_.empty()) throw std::invalid_argument("CollapseOperator needs at least one part");
  for (const auto& p : parts_) require_same_space(parts_.front().op.space(), p.op.space(), "CollapseOperator");
}

Operator CollapseOperator::at(double t) const {
  Operator out = Operator::zero(space());
  for (const auto& p : parts_) out += p.op * phase(-p.frequency, t);
  return out;
}

bool CollapseOperator::is_static() const {
  return std::all_of(parts_.begin(), parts_.end(),
                     [&](const PhasedPart& p) { return p.frequency == parts_.front().frequency; });
}

LindbladModel::LindbladModel(Operator h_static, std::vector<DriveTerm> drives,
                             std::vector<CollapseOperator> collapse_ops, Frame frame)
    : h_static_(std::move(h_static)),
      drives_(std::move(drives)),
      collapse_ops_(std::move(collapse_ops)),
      frame_(frame) {
  if (!h_static_.is_hermitian(kHermiticityTol)) {
    throw std::invalid_argument("LindbladModel: static Hamiltonian is not Hermitian");
  }
  for (const auto& d : drives_) {
    require_same_space(space(), d.coupling.space(), "LindbladModel drive");
    if (d.amplitude < 0.0) throw std::invalid_argument("LindbladModel: drive amplitude must be >= 0");
  }
  for (const auto& c : collapse_ops_) require_same_space(space(), c.space(), "LindbladModel collapse");
}

bool LindbladModel::is_time_independent() const {
  const bool static_drives = std::all_of(drives_.begin(), drives_.end(),
                                         [](const DriveTerm& d) { return d.phase_frequency == 0.0; });
  const bool static_collapse = std::all_of(collapse_ops_.begin(), collapse_ops_.end(),
                                           [](const CollapseOperator& c) { return c.is_static(); });
  return static_drives && static_collapse;
}

Operator LindbladModel::hamiltonian(double t) const {
  Operator h = h_static_;
  for (const auto& d : drives_) {
    const Operator x = d.coupling * phase(d.phase_frequency, t);
    h += (x + x.dagger()) * cd(d.amplitude);
  }
  return h;
}

void ThreeLevelParams::validate() const {
  for (double e : energies) {
    if (!std::isfinite(e)) throw std::invalid_argument("source.energies must be finite");
  }
  for (double g : decays) {
    if (!(g >= 0.0) || !std::isfinite(g)) throw std::invalid_argument("source.decays must be >= 0");
  }
  for (double r : rabi) {
    if (!(r >= 0.0) || !std::isfinite(r)) throw std::invalid_argument("source.rabi must be >= 0");
  }
}

LindbladModel three_level_model(const ThreeLevelParams& params, Frame frame) {
  params.validate();
  const HilbertSpace space{3};
  const Operator s12 = Operator::outer(space, 0, 1);  // |1><2|
  const Operator s13 = Operator::outer(space, 0, 2);  // |1><3|
  const Operator s23 = Operator::outer(space, 1, 2);  // |2><3|

  std::vector<CollapseOperator> collapse{s12 * cd(std::sqrt(params.decays[0])),
                                         s13 * cd(std::sqrt(params.decays[1]))};

  if (frame == Frame::rotating) {
    // Resonant drives: all bare energies are removed, couplings become static.
    Operator h = (s12 + s12.dagger()) * cd(0.5 * params.rabi[0]) +
                 (s23 + s23.dagger()) * cd(0.5 * params.rabi[1]);
    return LindbladModel(std::move(h), {}, std::move(collapse), Frame::rotating);
  }

  Operator h = Operator::zero(space);
  Matrix diag = Matrix::Zero(3, 3);
  for (int i = 0; i < 3; ++i) diag(i, i) = params.energies[i];
  h = Operator(space, diag);
  std::vector<DriveTerm> drives{
      {s12, 0.5 * params.rabi[0], params.energies[1] - params.energies[0]},
      {s23, 0.5 * params.rabi[1], params.energies[2] - params.energies[1]},
  };
  return LindbladModel(std::move(h), std::move(drives), std::move(collapse), Frame::lab);
}

LindbladGenerator::LindbladGenerator(const LindbladModel& model) : dim_(model.space().total()) {
  add_piece(k_pieces_, 0.0, model.h_static().matrix());
  for (const auto& d : model.drives()) {
    const Matrix& x = d.coupling.matrix();
    add_piece(k_pieces_, d.phase_frequency, d.amplitude * x);
    add_piece(k_pieces_, -d.phase_frequency, d.amplitude * x.adjoint());
  }
  for (const auto& c : model.collapse_ops()) {
    Channel ch;
    for (const auto& p : c.parts()) {
      const Matrix& m = p.op.matrix();
      for (int r = 0; r < dim_; ++r)
        for (int col = 0; col < dim_; ++col)
          if (m(r, col) != cd(0.0)) ch.entries.push_back({r, col, m(r, col), p.frequency});
      // C^dag C cross terms: op_p^dag op_q e^{i (f_p - f_q) t}
      for (const auto& q : c.parts()) {
        add_piece(k_pieces_, p.frequency - q.frequency,
                  cd(0.0, -0.5) * (p.op.matrix().adjoint() * q.op.matrix()));
      }
    }
    channels_.push_back(std::move(ch));
  }
  k_work_.resize(dim_, dim_);
  y_work_.resize(dim_, dim_);
}

Matrix LindbladGenerator::effective_hamiltonian(double t) const {
  Matrix k(dim_, dim_);
  effective_hamiltonian(t, k);
  return k;
}

void LindbladGenerator::effective_hamiltonian(double t, Matrix& out) const {
  out.setZero(dim_, dim_);
  for (const auto& [f, m] : k_pieces_) {
    if (f == 0.0) {
      out += m;
    } else {
      out += phase(f, t) * m;
    }
  }
}

void LindbladGenerator::apply_collapse(int channel, double t, const Vector& psi, Vector& out) const {
  out.setZero(dim_);
  for (const auto& e : channels_.at(channel).entries) {
    const cd v = e.frequency == 0.0 ? e.value : e.value * phase(-e.frequency, t);
    out(e.row) += v * psi(e.col);
  }
}

std::vector<Matrix> LindbladGenerator::collapse_at(double t) const {
  std::vector<Matrix> out;
  for (const auto& ch : channels_) {
    Matrix c = Matrix::Zero(dim_, dim_);
    for (const auto& e : ch.entries) c(e.row, e.col) += e.value * phase(-e.frequency, t);
    out.push_back(std::move(c));
  }
  return out;
}

void LindbladGenerator::prepare(double t) const {
  if (prepared_ && prepared_t_ == t) return;
  effective_hamiltonian(t, k_work_);
  entry_values_.resize(channels_.size());
  for (std::size_t c = 0; c < channels_.size(); ++c) {
    auto& vals = entry_values_[c];
    vals.clear();
    for (const auto& e : channels_[c].entries) {
      vals.push_back(e.frequency == 0.0 ? e.value : e.value * phase(-e.frequency, t));
    }
  }
  prepared_t_ = t;
  prepared_ = true;
}

void LindbladGenerator::apply(double t, const Matrix& x, Matrix& out) const {
  prepare(t);
  // Plain loops: Eigen's dynamic-size products are slow at these dimensions.
  const int d = dim_;
  out.resize(d, d);
  const cd* k = k_work_.data();
  const cd* xd = x.data();
  cd* o = out.data();
  for (int j = 0; j < d; ++j) {
    for (int i = 0; i < d; ++i) {
      cd s = 0.0;
      for (int l = 0; l < d; ++l) s += k[i + l * d] * xd[l + j * d] - xd[i + l * d] * std::conj(k[j + l * d]);
      o[i + j * d] = cd(s.imag(), -s.real());  // -i * s
    }
  }
  for (std::size_t c = 0; c < channels_.size(); ++c) {
    const auto& entries = channels_[c].entries;
    const auto& vals = entry_values_[c];
    // y = C x, then out += y C^dag, both from the nonzero entries of C.
    y_work_.setZero();
    cd* y = y_work_.data();
    for (std::size_t e = 0; e < entries.size(); ++e) {
      const int r = entries[e].row, col = entries[e].col;
      for (int j = 0; j < d; ++j) y[r + j * d] += vals[e] * xd[col + j * d];
    }
    for (std::size_t e = 0; e < entries.size(); ++e) {
      const int r = entries[e].row, col = entries[e].col;
      const cd v = std::conj(vals[e]);
      for (int i = 0; i < d; ++i) o[i + r * d] += v * y[i + col * d];
    }
  }
}

Operator rhs(const LindbladModel& model, const Operator& x, double t) {
  require_same_space(model.space(), x.space(), "rhs");
  const Operator h = model.hamiltonian(t);
  Matrix out = cd(0.0, -1.0) * (h.matrix() * x.matrix() - x.matrix() * h.matrix());
  for (const auto& c : model.collapse_ops()) {
    const Matrix cm = c.at(t).matrix();
    const Matrix cdc = cm.adjoint() * cm;
    out += cm * x.matrix() * cm.adjoint() - 0.5 * (cdc * x.matrix() + x.matrix() * cdc);
  }
  return Operator(model.space(), std::move(out));
}

Operator rhs(const LindbladModel& model, const DensityMatrix& rho, double t) {
  return rhs(model, rho.op(), t);
}

std::pair<long, double> rk4_steps(double span, double dt) {
  if (!(dt > 0.0)) throw std::invalid_argument("time step must be > 0");
  if (span < 0.0) throw std::invalid_argument("integration end precedes start");
  if (span == 0.0) return {0, dt};
  const long n = std::max(1L, static_cast<long>(std::ceil(span / dt - 1e-9)));
  return {n, span / static_cast<double>(n)};
}

Trajectory evolve(const LindbladModel& model, const DensityMatrix& rho0, double t0, double t1,
                  double dt, const EvolveOptions& options) {
  require_same_space(model.space(), rho0.space(), "evolve");
  if (options.store_every < 1) throw std::invalid_argument("store_every must be >= 1");
  const auto [n, h] = rk4_steps(t1 - t0, dt);
  const LindbladGenerator gen(model);
  const int d = gen.dim();

  Trajectory traj;
  traj.worst.min_eigenvalue = 1.0;
  auto store = [&](double t, const Matrix& x) {
    const StateDefects defects = measure_defects(x);
    if (!defects.within(options.hermiticity_tol, options.trace_tol, options.positivity_floor)) {
      std::ostringstream os;
      os << "evolve: state at t=" << t << " violates invariants (hermiticity " << defects.hermiticity
         << ", trace " << defects.trace << ", min eigenvalue " << defects.min_eigenvalue << ")";
      throw InvariantViolation(os.str());
    }
    traj.worst.hermiticity = std::max(traj.worst.hermiticity, defects.hermiticity);
    traj.worst.trace = std::max(traj.worst.trace, defects.trace);
    traj.worst.min_eigenvalue = std::min(traj.worst.min_eigenvalue, defects.min_eigenvalue);
    traj.times.push_back(t);
    traj.states.emplace_back(Operator(model.space(), x));
  };

  Matrix x = rho0.matrix();
  Matrix k1(d, d), k2(d, d), k3(d, d), k4(d, d), tmp(d, d);
  store(t0, x);
  for (long s = 0; s < n; ++s) {
    const double t = t0 + static_cast<double>(s) * h;
    gen.apply(t, x, k1);
    tmp = x + (0.5 * h) * k1;
    gen.apply(t + 0.5 * h, tmp, k2);
    tmp = x + (0.5 * h) * k2;
    gen.apply(t + 0.5 * h, tmp, k3);
    tmp = x + h * k3;
    gen.apply(t + h, tmp, k4);
    x += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    if ((s + 1) % options.store_every == 0 || s + 1 == n) {
      store(s + 1 == n ? t1 : t0 + static_cast<double>(s + 1) * h, x);
    }
  }
  return traj;
}

Matrix build_superoperator(const LindbladModel& model) {
  if (!model.is_time_independent()) {
    throw std::invalid_argument("build_superoperator: model is time dependent");
  }
  const LindbladGenerator gen(model);
  const int d = gen.dim();
  const Matrix id = Matrix::Identity(d, d);
  const Matrix k = gen.effective_hamiltonian(0.0);
  auto kron = [](const Matrix& a, const Matrix& b) {
    Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i)
      for (Eigen::Index j = 0; j < a.cols(); ++j)
        out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return out;
  };
  Matrix g = cd(0.0, -1.0) * kron(k, id) + cd(0.0, 1.0) * kron(id, k.conjugate());
  for (const Matrix& c : gen.collapse_at(0.0)) g += kron(c, c.conjugate());
  return g;
}

Matrix rk4_propagator(const Matrix& generator, double step, int substeps) {
  if (substeps < 1) throw std::invalid_argument("rk4_propagator: substeps must be >= 1");
  const Eigen::Index n = generator.rows();
  const Matrix id = Matrix::Identity(n, n);
  const Matrix hg = step * generator;
  // Horner form of I + hG + (hG)^2/2 + (hG)^3/6 + (hG)^4/24.
  Matrix r = id + hg / 4.0;
  r = id + (hg / 3.0) * r;
  r = id + (hg / 2.0) * r;
  r = id + hg * r;
  Matrix out = id;
  Matrix base = r;
  for (int k = substeps; k > 0; k >>= 1) {
    if (k & 1) out = out * base;
    if (k > 1) base = base * base;
  }
  return out;
}

DensityMatrix steady_state(const LindbladModel& model) {
  const Matrix g = build_superoperator(model);
  const int d = model.space().total();
  Eigen::JacobiSVD<Matrix> svd(g, Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  const double threshold = 1e-10 * sv(0);
  long null_dim = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i) null_dim += sv(i) <= threshold ? 1 : 0;
  if (null_dim != 1) {
    std::ostringstream os;
    os << "steady_state: null space has dimension " << null_dim << " (smallest singular value "
       << sv(sv.size() - 1) << ", threshold " << threshold << ")";
    throw SteadyStateError(os.str());
  }
  const Vector v = svd.matrixV().col(sv.size() - 1);
  DensityMatrix rho = DensityMatrix::normalized(Operator(model.space(), unvectorize(v, d)));
  const double residual = (g * vectorize(rho.matrix())).norm();
  if (residual > 1e-9) {
    std::ostringstream os;
    os << "steady_state: residual " << residual << " exceeds 1e-9";
    throw SteadyStateError(os.str());
  }
  return rho;
}

}  // namespace tdspec
