// Copyright 2026 The nvdfs Authors
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
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace nvdfs {

using Complex = std::complex<double>;
/// Dense complex square matrix: Hamiltonians, dissipators, density matrices.
using Operator = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;

// Global basis ordering. NV electron spin: {+1, 0, -1}; truncated manifolds
// drop -1. Nuclear spin-1/2: {up, down}. Composite spaces are lexicographic in
// site order (NV, C1, C2).
enum class NvLevel : int { plus = 0, zero = 1, minus = 2 };
enum class Nuclear : int { up = 0, down = 1 };

constexpr int nuclear_pair_index(Nuclear c1, Nuclear c2) {
  return 2 * static_cast<int>(c1) + static_cast<int>(c2);
}

/// Normalized pure state with a fixed global phase.
///
/// The default constructor rule rotates the phase so that the
/// largest-magnitude amplitude (first one on ties within 1e-12) is real and
/// nonnegative. Closed-form eigenstates whose sign convention is part of the
/// formula use `preserve_phase` instead.
class StateVector {
 public:
  explicit StateVector(ComplexVector amplitudes);

  static StateVector preserve_phase(ComplexVector amplitudes);
  static StateVector basis(int dim, int index);

  int dim() const { return static_cast<int>(amplitudes_.size()); }
  const ComplexVector& amplitudes() const { return amplitudes_; }
  Complex operator[](int i) const { return amplitudes_(i); }

  Complex inner(const StateVector& other) const { return amplitudes_.dot(other.amplitudes_); }
  Operator projector() const { return amplitudes_ * amplitudes_.adjoint(); }

 private:
  struct NoPhaseFix {};
  StateVector(ComplexVector amplitudes, NoPhaseFix);

  ComplexVector amplitudes_;
};

struct Spin1Operators {
  Operator sx, sy, sz;
};

struct SpinHalfOperators {
  Operator ix, iy, iz, iplus, iminus;
};

Spin1Operators spin1_operators();
SpinHalfOperators spin_half_operators();

Operator identity(int dim);
Operator kron(const Operator& a, const Operator& b);

/// identity x ... x op x ... x identity with `op` at `site`.
Operator embed(const Operator& op, std::size_t site, std::span<const int> dims);

Operator commutator(const Operator& a, const Operator& b);

double max_abs(const Operator& op);

/// max|H - H^dagger| divided by max|H| (0 for the zero matrix).
double hermiticity_residual(const Operator& op);
bool is_hermitian(const Operator& op, double relative_tolerance = 1e-12);

/// Hermitian matrix spectrum, ascending.
Eigen::VectorXd hermitian_eigenvalues(const Operator& op);

/// Principal submatrix on the given (ordered) indices.
Operator principal_submatrix(const Operator& op, std::span<const int> indices);

}  // namespace nvdfs
