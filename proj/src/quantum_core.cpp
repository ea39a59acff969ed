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

#include "tdspec/quantum_core.hpp"

#include <cmath>
#include <sstream>

#include <Eigen/Eigenvalues>

namespace tdspec {

HilbertSpace::HilbertSpace(std::vector<int> subsystem_dims) : dims_(std::move(subsystem_dims)) {
  if (dims_.empty()) throw DimensionError("HilbertSpace needs at least one subsystem");
  total_ = 1;
  for (int d : dims_) {
    if (d < 1) throw DimensionError("HilbertSpace subsystem dimension must be >= 1");
    total_ *= d;
  }
}

std::string HilbertSpace::to_string() const {
  std::ostringstream os;
  os << '[';
  for (std::size_t i = 0; i < dims_.size(); ++i) os << (i ? "," : "") << dims_[i];
  os << ']';
  return os.str();
}

HilbertSpace concat(const HilbertSpace& a, const HilbertSpace& b) {
  std::vector<int> dims = a.dims();
  dims.insert(dims.end(), b.dims().begin(), b.dims().end());
  return HilbertSpace(std::move(dims));
}

void require_same_space(const HilbertSpace& a, const HilbertSpace& b, const char* what) {
  if (!(a == b)) {
    throw DimensionError(std::string(what) + ": space mismatch " + a.to_string() + " vs " +
                         b.to_string());
  }
}

Operator::Operator(HilbertSpace space, Matrix matrix)
    : space_(std::move(space)), matrix_(std::move(matrix)) {
  const int d = space_.total();
  if (matrix_.rows() != d || matrix_.cols() != d) {
    std::ostringstream os;
    os << "Operator matrix is " << matrix_.rows() << "x" << matrix_.cols() << " but space "
       << space_.to_string() << " has dimension " << d;
    throw DimensionError(os.str());
  }
}

Operator Operator::zero(const HilbertSpace& space) {
  return Operator(space, Matrix::Zero(space.total(), space.total()));
}

Operator Operator::identity(const HilbertSpace& space) {
  return Operator(space, Matrix::Identity(space.total(), space.total()));
}

Operator Operator::outer(const HilbertSpace& space, int row, int col) {
  const int d = space.total();
  if (row < 0 || row >= d || col < 0 || col >= d) {
    throw DimensionError("Operator::outer index out of range");
  }
  Matrix m = Matrix::Zero(d, d);
  m(row, col) = 1.0;
  return Operator(space, std::move(m));
}

Operator Operator::dagger() const { return Operator(space_, matrix_.adjoint()); }

bool Operator::is_hermitian(double tol) const {
  return (matrix_ - matrix_.adjoint()).cwiseAbs().maxCoeff() <= tol;
}

double Operator::max_abs() const {
  return matrix_.size() == 0 ? 0.0 : matrix_.cwiseAbs().maxCoeff();
}

Operator& Operator::operator+=(const Operator& other) {
  require_same_space(space_, other.space_, "Operator +");
  matrix_ += other.matrix_;
  return *this;
}

Operator& Operator::operator-=(const Operator& other) {
  require_same_space(space_, other.space_, "Operator -");
  matrix_ -= other.matrix_;
  return *this;
}

Operator& Operator::operator*=(cd scale) {
  matrix_ *= scale;
  return *this;
}

Operator operator*(const Operator& a, const Operator& b) {
  require_same_space(a.space(), b.space(), "Operator *");
  return Operator(a.space(), a.matrix() * b.matrix());
}

StateDefects measure_defects(const Matrix& m) {
  StateDefects d;
  d.hermiticity = (m - m.adjoint()).cwiseAbs().maxCoeff();
  d.trace = std::abs(m.trace() - cd(1.0));
  const Matrix h = 0.5 * (m + m.adjoint());
  Eigen::SelfAdjointEigenSolver<Matrix> es(h, Eigen::EigenvaluesOnly);
  d.min_eigenvalue = es.eigenvalues().minCoeff();
  return d;
}

DensityMatrix::DensityMatrix(Operator op) : op_(std::move(op)) {
  const StateDefects d = measure_defects(op_.matrix());
  if (!d.within(kHermiticityTol, kTraceTol, kPositivityFloor)) {
    std::ostringstream os;
    os << "not a density matrix: hermiticity defect " << d.hermiticity << ", trace defect "
       << d.trace << ", min eigenvalue " << d.min_eigenvalue;
    throw InvariantViolation(os.str());
  }
}

DensityMatrix DensityMatrix::normalized(const Operator& op) {
  Matrix h = 0.5 * (op.matrix() + op.matrix().adjoint());
  const cd tr = h.trace();
  if (std::abs(tr) == 0.0) throw InvariantViolation("cannot normalize a traceless operator");
  h /= tr.real();
  return DensityMatrix(Operator(op.space(), std::move(h)));
}

DensityMatrix DensityMatrix::pure(const HilbertSpace& space, const Vector& amplitudes) {
  if (amplitudes.size() != space.total()) throw DimensionError("pure state length mismatch");
  const Vector v = amplitudes / amplitudes.norm();
  return DensityMatrix(Operator(space, v * v.adjoint()));
}

DensityMatrix DensityMatrix::basis(const HilbertSpace& space, int level) {
  return DensityMatrix(Operator::outer(space, level, level));
}

StateVector::StateVector(HilbertSpace space, Vector amplitudes)
    : space_(std::move(space)), amplitudes_(std::move(amplitudes)) {
  if (amplitudes_.size() != space_.total()) throw DimensionError("StateVector length mismatch");
  if (std::abs(amplitudes_.norm() - 1.0) > kNormTol) {
    throw InvariantViolation("StateVector is not normalized");
  }
}

StateVector StateVector::basis(const HilbertSpace& space, int level) {
  if (level < 0 || level >= space.total()) throw DimensionError("basis level out of range");
  Vector v = Vector::Zero(space.total());
  v(level) = 1.0;
  return StateVector(space, std::move(v));
}

void StateVector::normalize() {
  const double n = amplitudes_.norm();
  if (n == 0.0) throw InvariantViolation("cannot normalize a zero state");
  amplitudes_ /= n;
}

Operator tensor(const Operator& a, const Operator& b) {
  const Matrix& A = a.matrix();
  const Matrix& B = b.matrix();
  const Eigen::Index rb = B.rows();
  Matrix out(A.rows() * rb, A.cols() * rb);
  for (Eigen::Index i = 0; i < A.rows(); ++i) {
    for (Eigen::Index j = 0; j < A.cols(); ++j) {
      out.block(i * rb, j * rb, rb, rb) = A(i, j) * B;
    }
  }
  return Operator(concat(a.space(), b.space()), std::move(out));
}

Operator lift(const Operator& op, int target_index, const HilbertSpace& space) {
  if (target_index < 0 || target_index >= static_cast<int>(space.subsystems())) {
    throw DimensionError("lift: target index out of range");
  }
  if (op.space().subsystems() != 1 || op.dim() != space.dim(target_index)) {
    throw DimensionError("lift: operator dimension " + op.space().to_string() +
                         " does not match subsystem " + std::to_string(target_index) + " of " +
                         space.to_string());
  }
  Operator result = Operator::identity(HilbertSpace{space.dim(0)});
  if (target_index == 0) result = op;
  for (std::size_t k = 1; k < space.subsystems(); ++k) {
    const Operator factor = static_cast<int>(k) == target_index
                                ? op
                                : Operator::identity(HilbertSpace{space.dim(k)});
    result = tensor(result, factor);
  }
  return result;
}

Operator partial_trace(const Operator& op, int keep_index) {
  const HilbertSpace& space = op.space();
  if (keep_index < 0 || keep_index >= static_cast<int>(space.subsystems())) {
    throw DimensionError("partial_trace: keep index out of range");
  }
  if (space.subsystems() < 2) throw DimensionError("partial_trace needs a multi-subsystem space");
  // Split the flat index into (outer, kept, inner) with strides.
  int inner = 1;
  for (std::size_t k = keep_index + 1; k < space.subsystems(); ++k) inner *= space.dim(k);
  const int kept = space.dim(keep_index);
  const int outer = space.total() / (inner * kept);
  const Matrix& m = op.matrix();
  Matrix reduced = Matrix::Zero(kept, kept);
  for (int a = 0; a < kept; ++a) {
    for (int b = 0; b < kept; ++b) {
      cd sum = 0.0;
      for (int o = 0; o < outer; ++o) {
        for (int n = 0; n < inner; ++n) {
          sum += m((o * kept + a) * inner + n, (o * kept + b) * inner + n);
        }
      }
      reduced(a, b) = sum;
    }
  }
  return Operator(HilbertSpace{kept}, std::move(reduced));
}

DensityMatrix partial_trace(const DensityMatrix& rho, int keep_index) {
  return DensityMatrix(partial_trace(rho.op(), keep_index));
}

cd expectation(const DensityMatrix& rho, const Operator& op) {
  require_same_space(rho.space(), op.space(), "expectation");
  return (rho.matrix() * op.matrix()).trace();
}

cd expectation(const StateVector& psi, const Operator& op) {
  require_same_space(psi.space(), op.space(), "expectation");
  return psi.amplitudes().dot(op.matrix() * psi.amplitudes());
}

}  // namespace tdspec
