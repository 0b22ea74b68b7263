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

#include <doctest.h>

#include <array>
#include <random>

#include "nvdfs/error.hpp"
#include "nvdfs/spin_algebra.hpp"
#include "support.hpp"

using namespace nvdfs;

namespace {

// Kronecker product from its index definition.
Operator kron_by_index(const Operator& a, const Operator& b) {
  Operator out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < out.rows(); ++i) {
    for (Eigen::Index j = 0; j < out.cols(); ++j) {
      out(i, j) = a(i / b.rows(), j / b.cols()) * b(i % b.rows(), j % b.cols());
    }
  }
  return out;
}

}  // namespace

TEST_CASE("spin-1 operators satisfy the angular momentum algebra") {
  const auto s = spin1_operators();
  const Complex i(0.0, 1.0);
  CHECK(max_abs(commutator(s.sx, s.sy) - i * s.sz) < 1e-15);
  CHECK(max_abs(commutator(s.sy, s.sz) - i * s.sx) < 1e-15);
  CHECK(max_abs(commutator(s.sz, s.sx) - i * s.sy) < 1e-15);
  const Operator casimir = s.sx * s.sx + s.sy * s.sy + s.sz * s.sz;
  CHECK(max_abs(casimir - 2.0 * identity(3)) < 1e-15);
  CHECK(s.sz(0, 0).real() == 1.0);
  CHECK(s.sz(1, 1).real() == 0.0);
  CHECK(s.sz(2, 2).real() == -1.0);
}

TEST_CASE("spin-1/2 operators and ladder operators") {
  const auto n = spin_half_operators();
  const Complex i(0.0, 1.0);
  CHECK(max_abs(commutator(n.ix, n.iy) - i * n.iz) < 1e-15);
  CHECK(max_abs(n.iplus - (n.ix + i * n.iy)) < 1e-15);
  CHECK(max_abs(n.iminus - n.iplus.adjoint()) < 1e-15);
  CHECK(max_abs(n.ix * n.ix + n.iy * n.iy + n.iz * n.iz - 0.75 * identity(2)) < 1e-15);
  // index 0 is spin up
  CHECK(n.iz(0, 0).real() == doctest::Approx(0.5));
}

TEST_CASE("kron matches the index definition") {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 20; ++trial) {
    const int na = 1 + trial % 3;
    const int nb = 2 + trial % 2;
    const Operator a = testing::random_hermitian(na, rng);
    const Operator b = testing::random_hermitian(nb, rng);
    CHECK(max_abs(kron(a, b) - kron_by_index(a, b)) < 1e-15);
  }
}

TEST_CASE("embed places an operator on one site of a register") {
  const auto n = spin_half_operators();
  const auto s = spin1_operators();
  const std::array<int, 3> dims{3, 2, 2};
  const Operator sz = embed(s.sz, 0, dims);
  const Operator iz2 = embed(n.iz, 2, dims);
  CHECK(sz.rows() == 12);
  CHECK(max_abs(sz - kron_by_index(kron_by_index(s.sz, identity(2)), identity(2))) < 1e-15);
  CHECK(max_abs(iz2 - kron_by_index(identity(6), n.iz)) < 1e-15);
  CHECK(max_abs(commutator(sz, iz2)) == 0.0);
  CHECK_THROWS_AS(embed(n.iz, 0, dims), DimensionError);
  CHECK_THROWS_AS(embed(n.iz, 3, dims), DimensionError);
}

TEST_CASE("hermiticity helpers") {
  std::mt19937_64 rng(11);
  const Operator h = testing::random_hermitian(5, rng);
  CHECK(is_hermitian(h));
  CHECK(hermiticity_residual(h) < 1e-15);
  Operator a = h;
  a(0, 1) += Complex(0.0, 0.5);
  CHECK_FALSE(is_hermitian(a));
  const auto ev = hermitian_eigenvalues(h);
  for (Eigen::Index k = 1; k < ev.size(); ++k) CHECK(ev(k) >= ev(k - 1));
  CHECK(ev.sum() == doctest::Approx(h.trace().real()).epsilon(1e-12));
}

TEST_CASE("principal_submatrix keeps the selected rows and columns") {
  std::mt19937_64 rng(3);
  const Operator h = testing::random_hermitian(6, rng);
  const std::array<int, 3> idx{4, 1, 2};
  const Operator sub = principal_submatrix(h, idx);
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) CHECK(sub(i, j) == h(idx[i], idx[j]));
  }
  const std::array<int, 1> bad{6};
  CHECK_THROWS_AS(principal_submatrix(h, bad), DimensionError);
}

TEST_CASE("StateVector normalizes and fixes the global phase") {
  ComplexVector v(3);
  v << Complex(0.0, 2.0), Complex(1.0, 0.0), Complex(0.0, 0.0);
  const StateVector s(v);
  CHECK(s.amplitudes().norm() == doctest::Approx(1.0));
  CHECK(s[0].imag() == 0.0);
  CHECK(s[0].real() > 0.0);
  CHECK(s[1].imag() == doctest::Approx(-1.0 / std::sqrt(5.0)));
  // Phase rule is a gauge: states differing by a global phase coincide.
  const StateVector t(v * std::polar(1.0, 0.7));
  CHECK((s.amplitudes() - t.amplitudes()).norm() < 1e-14);
  const auto p = StateVector::preserve_phase(v);
  CHECK(p[0].imag() == doctest::Approx(2.0 / std::sqrt(5.0)));
  CHECK_THROWS_AS(StateVector(ComplexVector::Zero(2)), DomainError);
  CHECK_THROWS_AS(StateVector::basis(2, 2), DimensionError);
  CHECK(max_abs(s.projector() * s.projector() - s.projector()) < 1e-15);
}
