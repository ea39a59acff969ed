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

#include <complex>
#include <cstddef>
#include <initializer_list>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace tdspec {

using cd = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

inline constexpr cd kI{0.0, 1.0};

/// Raised when a dimension or index does not fit the Hilbert space it is used with.
class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Raised when a density matrix or state vector leaves its admissible set.
class InvariantViolation : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Ordered list of subsystem dimensions. Subsystem 0 is the leftmost Kronecker
/// factor (row-major convention: the last subsystem index varies fastest).
class HilbertSpace {
 public:
  HilbertSpace() = default;
  explicit HilbertSpace(std::vector<int> subsystem_dims);
  HilbertSpace(std::initializer_list<int> subsystem_dims)
      : HilbertSpace(std::vector<int>(subsystem_dims)) {}

  const std::vector<int>& dims() const { return dims_; }
  std::size_t subsystems() const { return dims_.size(); }
  int dim(std::size_t index) const { return dims_.at(index); }
  int total() const { return total_; }

  bool operator==(const HilbertSpace&) const = default;

  std::string to_string() const;

 private:
  std::vector<int> dims_;
  int total_ = 0;
};

HilbertSpace concat(const HilbertSpace& a, const HilbertSpace& b);

/// Dense complex matrix bound to a Hilbert space.
class Operator {
 public:
  Operator() = default;
  Operator(HilbertSpace space, Matrix matrix);

  static Operator zero(const HilbertSpace& space);
  static Operator identity(const HilbertSpace& space);
  /// |row><col| on a single-subsystem or flattened space (0-based indices).
  static Operator outer(const HilbertSpace& space, int row, int col);

  const HilbertSpace& space() const { return space_; }
  const Matrix& matrix() const { return matrix_; }
  int dim() const { return space_.total(); }
  cd operator()(int r, int c) const { return matrix_(r, c); }

  Operator dagger() const;
  cd trace() const { return matrix_.trace(); }
  bool is_hermitian(double tol) const;
  /// max_ij |M_ij|
  double max_abs() const;

  Operator& operator+=(const Operator& other);
  Operator& operator-=(const Operator& other);
  Operator& operator*=(cd scale);

  friend Operator operator+(Operator a, const Operator& b) { return a += b; }
  friend Operator operator-(Operator a, const Operator& b) { return a -= b; }
  friend Operator operator*(Operator a, cd s) { return a *= s; }
  friend Operator operator*(cd s, Operator a) { return a *= s; }
  friend Operator operator*(const Operator& a, const Operator& b);

 private:
  HilbertSpace space_;
  Matrix matrix_;
};

void require_same_space(const HilbertSpace& a, const HilbertSpace& b, const char* what);

/// Hermitian, unit-trace, positive semidefinite operator.
class DensityMatrix {
 public:
  static constexpr double kHermiticityTol = 1e-10;
  static constexpr double kTraceTol = 1e-9;
  static constexpr double kPositivityFloor = -1e-8;

  /// Validates all invariants; throws InvariantViolation with a diagnostic otherwise.
  explicit DensityMatrix(Operator op);

  /// Hermitizes and renormalizes the trace before validating.
  static DensityMatrix normalized(const Operator& op);
  static DensityMatrix pure(const HilbertSpace& space, const Vector& amplitudes);
  /// |level><level| (0-based).
  static DensityMatrix basis(const HilbertSpace& space, int level);

  const Operator& op() const { return op_; }
  const HilbertSpace& space() const { return op_.space(); }
  const Matrix& matrix() const { return op_.matrix(); }
  int dim() const { return op_.dim(); }

 private:
  Operator op_;
};

/// Measured deviations of a matrix from the density-matrix conditions.
struct StateDefects {
  double hermiticity = 0.0;  // max |M - M^dag|
  double trace = 0.0;        // |Tr M - 1|
  double min_eigenvalue = 0.0;

  bool within(double herm_tol, double trace_tol, double eig_floor) const {
    return hermiticity <= herm_tol && trace <= trace_tol && min_eigenvalue >= eig_floor;
  }
};

StateDefects measure_defects(const Matrix& m);

class StateVector {
 public:
  static constexpr double kNormTol = 1e-9;

  StateVector(HilbertSpace space, Vector amplitudes);
  static StateVector basis(const HilbertSpace& space, int level);

  const HilbertSpace& space() const { return space_; }
  const Vector& amplitudes() const { return amplitudes_; }
  double norm() const { return amplitudes_.norm(); }
  void normalize();

 private:
  HilbertSpace space_;
  Vector amplitudes_;
};

/// Kronecker product; the result lives on concat(a.space, b.space).
Operator tensor(const Operator& a, const Operator& b);

/// Embeds `op` on subsystem `target_index` of `space`, identity elsewhere.
Operator lift(const Operator& op, int target_index, const HilbertSpace& space);

/// Reduced state on subsystem `keep_index`.
DensityMatrix partial_trace(const DensityMatrix& rho, int keep_index);
/// Same contraction on an arbitrary operator (no density-matrix checks).
Operator partial_trace(const Operator& op, int keep_index);

/// Tr(rho * op)
cd expectation(const DensityMatrix& rho, const Operator& op);
/// <psi|op|psi>
cd expectation(const StateVector& psi, const Operator& op);

}  // namespace tdspec
