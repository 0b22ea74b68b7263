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

#include "nvdfs/spin_algebra.hpp"

#include <cmath>
#include <numeric>
#include <string>

#include "nvdfs/error.hpp"

namespace nvdfs {

namespace {

constexpr double kTieTolerance = 1e-12;

ComplexVector normalized(ComplexVector v) {
  const double norm = v.norm();
  if (!(norm > 0.0) || !std::isfinite(norm)) {
    throw DomainError("StateVector: amplitudes must have finite nonzero norm");
  }
  v /= norm;
  return v;
}

}  // namespace

StateVector::StateVector(ComplexVector amplitudes) : amplitudes_(normalized(std::move(amplitudes))) {
  int lead = 0;
  double best = -1.0;
  for (int i = 0; i < amplitudes_.size(); ++i) {
    const double mag = std::abs(amplitudes_(i));
    if (mag > best + kTieTolerance) {
      best = mag;
      lead = i;
    }
  }
  const Complex z = amplitudes_(lead);
  if (std::abs(z) > 0.0) amplitudes_ *= std::conj(z) / std::abs(z);
  amplitudes_(lead) = Complex(std::abs(amplitudes_(lead)), 0.0);
}

StateVector::StateVector(ComplexVector amplitudes, NoPhaseFix)
    : amplitudes_(normalized(std::move(amplitudes))) {}

StateVector StateVector::preserve_phase(ComplexVector amplitudes) {
  return StateVector(std::move(amplitudes), NoPhaseFix{});
}

StateVector StateVector::basis(int dim, int index) {
  if (index < 0 || index >= dim) throw DimensionError("StateVector::basis: index out of range");
  ComplexVector v = ComplexVector::Zero(dim);
  v(index) = 1.0;
  return StateVector(std::move(v), NoPhaseFix{});
}

Spin1Operators spin1_operators() {
  const double r = 1.0 / std::sqrt(2.0);
  const Complex i(0.0, 1.0);
  Spin1Operators s{Operator::Zero(3, 3), Operator::Zero(3, 3), Operator::Zero(3, 3)};
  // Basis {+1, 0, -1}.
  s.sx(0, 1) = s.sx(1, 0) = s.sx(1, 2) = s.sx(2, 1) = r;
  s.sy(0, 1) = -i * r;
  s.sy(1, 0) = i * r;
  s.sy(1, 2) = -i * r;
  s.sy(2, 1) = i * r;
  s.sz(0, 0) = 1.0;
  s.sz(2, 2) = -1.0;
  return s;
}

SpinHalfOperators spin_half_operators() {
  const Complex i(0.0, 1.0);
  SpinHalfOperators s;
  s.ix = Operator::Zero(2, 2);
  s.iy = Operator::Zero(2, 2);
  s.iz = Operator::Zero(2, 2);
  // Basis {up, down}.
  s.ix(0, 1) = s.ix(1, 0) = 0.5;
  s.iy(0, 1) = -0.5 * i;
  s.iy(1, 0) = 0.5 * i;
  s.iz(0, 0) = 0.5;
  s.iz(1, 1) = -0.5;
  s.iplus = s.ix + i * s.iy;
  s.iminus = s.ix - i * s.iy;
  return s;
}

Operator identity(int dim) { return Operator::Identity(dim, dim); }

Operator kron(const Operator& a, const Operator& b) {
  Operator out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

Operator embed(const Operator& op, std::size_t site, std::span<const int> dims) {
  if (site >= dims.size()) {
    throw DimensionError("embed: site index " + std::to_string(site) + " out of range");
  }
  if (op.rows() != op.cols() || op.rows() != dims[site]) {
    throw DimensionError("embed: operator dimension " + std::to_string(op.rows()) +
                         " does not match site dimension " + std::to_string(dims[site]));
  }
  Operator out = Operator::Identity(1, 1);
  for (std::size_t k = 0; k < dims.size(); ++k) {
    out = kron(out, k == site ? op : identity(dims[k]));
  }
  return out;
}

Operator commutator(const Operator& a, const Operator& b) { return a * b - b * a; }

double max_abs(const Operator& op) { return op.size() == 0 ? 0.0 : op.cwiseAbs().maxCoeff(); }

double hermiticity_residual(const Operator& op) {
  if (op.rows() != op.cols()) throw DimensionError("hermiticity_residual: matrix is not square");
  const double scale = max_abs(op);
  if (scale == 0.0) return 0.0;
  return max_abs(op - op.adjoint()) / scale;
}

bool is_hermitian(const Operator& op, double relative_tolerance) {
  return hermiticity_residual(op) <= relative_tolerance;
}

Eigen::VectorXd hermitian_eigenvalues(const Operator& op) {
  Eigen::SelfAdjointEigenSolver<Operator> solver(op, Eigen::EigenvaluesOnly);
  return solver.eigenvalues();
}

Operator principal_submatrix(const Operator& op, std::span<const int> indices) {
  const auto n = static_cast<Eigen::Index>(indices.size());
  Operator out(n, n);
  for (Eigen::Index a = 0; a < n; ++a) {
    for (Eigen::Index b = 0; b < n; ++b) {
      const int i = indices[a];
      const int j = indices[b];
      if (i < 0 || j < 0 || i >= op.rows() || j >= op.cols()) {
        throw DimensionError("principal_submatrix: index out of range");
      }
      out(a, b) = op(i, j);
    }
  }
  return out;
}

}  // namespace nvdfs
