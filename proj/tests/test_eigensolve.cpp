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

#include <algorithm>
#include <array>
#include <random>

#include "nvdfs/eigensolve.hpp"
#include "nvdfs/error.hpp"
#include "nvdfs/system_model.hpp"
#include "nvdfs/units.hpp"
#include "support.hpp"

using namespace nvdfs;

namespace {

RegisterConfig reg2() { return RegisterConfig::two_carbon(); }

// Roots of det(x - T) for a real symmetric 3x3 T by bracketing and bisection,
// using the interlacing of the leading 2x2 block.
std::array<double, 3> cubic_roots_bisection(const Eigen::Matrix3d& t) {
  const double c2 = -t.trace();
  const double c1 = t(0, 0) * t(1, 1) - t(0, 1) * t(1, 0) + t(0, 0) * t(2, 2) - t(0, 2) * t(2, 0) +
                    t(1, 1) * t(2, 2) - t(1, 2) * t(2, 1);
  const double c0 = -t.determinant();
  auto p = [&](double x) { return ((x + c2) * x + c1) * x + c0; };
  const double bound = 1.0 + std::abs(c2) + std::abs(c1) + std::abs(c0);
  // Sample densely, then refine every sign change; fall back to extrema for double roots.
  std::vector<double> roots;
  const int n = 20000;
  double prev_x = -bound;
  double prev = p(prev_x);
  for (int i = 1; i <= n; ++i) {
    const double x = -bound + 2.0 * bound * i / n;
    const double v = p(x);
    if (prev == 0.0) roots.push_back(prev_x);
    if (prev * v < 0.0) {
      double lo = prev_x, hi = x;
      for (int k = 0; k < 200; ++k) {
        const double mid = 0.5 * (lo + hi);
        (p(lo) * p(mid) <= 0.0 ? hi : lo) = mid;
      }
      roots.push_back(0.5 * (lo + hi));
    }
    prev_x = x;
    prev = v;
  }
  std::sort(roots.begin(), roots.end());
  REQUIRE(roots.size() == 3);
  return {roots[0], roots[1], roots[2]};
}

Eigen::Matrix3d triplet_block(const Operator& h) {
  // Triplet basis {uu, dd, (ud + du)/sqrt2}.
  const double r = 1.0 / std::sqrt(2.0);
  Eigen::Matrix<std::complex<double>, 4, 3> b = Eigen::Matrix<std::complex<double>, 4, 3>::Zero();
  b(0, 0) = 1.0;
  b(3, 1) = 1.0;
  b(1, 2) = r;
  b(2, 2) = r;
  const Eigen::Matrix3cd t = b.adjoint() * h * b;
  REQUIRE(t.imag().cwiseAbs().maxCoeff() < 1e-14);
  return t.real();
}

double scale_of(MagneticField b, const RegisterConfig& reg) {
  return reg.constants.gamma_c * std::hypot(b.bx, b.bz) + reg.d12;
}

}  // namespace

TEST_CASE("closed-form energies match bisection roots of the characteristic cubic") {
  const auto reg = reg2();
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> bx(0.0, 150.0), bz(0.0, 100.0);
  for (int trial = 0; trial < 30; ++trial) {
    const MagneticField b{bx(rng), bz(rng)};
    const auto es = ms0_eigensystem(b, reg.d12, reg.constants.gamma_c);
    const auto roots = cubic_roots_bisection(triplet_block(h_ms0(b, reg)));
    std::array<double, 3> closed{es.energies[0], es.energies[2], es.energies[3]};
    std::sort(closed.begin(), closed.end());
    for (int k = 0; k < 3; ++k) CHECK(std::abs(closed[k] - roots[k]) < 1e-10 * scale_of(b, reg));
    CHECK(es.energies[1] == 0.0);
    CHECK(es.energies[0] >= es.energies[2]);
    CHECK(es.energies[2] >= es.energies[3]);
  }
}

TEST_CASE("closed form agrees with numerical diagonalization on a field grid") {
  const auto reg = reg2();
  for (int i = 0; i < 15; ++i) {
    for (int j = 0; j < 15; ++j) {
      const MagneticField b{150.0 * i / 14.0, 100.0 * j / 14.0};
      const Operator h = h_ms0(b, reg);
      const auto es = ms0_eigensystem(b, reg.d12, reg.constants.gamma_c);
      const double scale = scale_of(b, reg);
      for (int k = 0; k < 4; ++k) {
        const ComplexVector v = es.states[k].amplitudes();
        CHECK(v.norm() == doctest::Approx(1.0).epsilon(1e-12));
        CHECK((h * v - es.energies[k] * v).norm() < 1e-9 * scale);
        for (int m = 0; m < k; ++m) CHECK(std::abs(es.states[m].inner(es.states[k])) < 1e-9);
      }
      const auto num = numerical_eig(h);
      std::array<double, 4> e{es.energies[0], es.energies[1], es.energies[2], es.energies[3]};
      std::sort(e.begin(), e.end());
      for (int k = 0; k < 4; ++k) CHECK(std::abs(e[k] - num.energies(k)) < 1e-9 * scale);
    }
  }
}

TEST_CASE("psi_2 is the field-independent singlet") {
  const auto reg = reg2();
  const auto s = singlet_state();
  CHECK(std::abs(s[1] - Complex(-1.0 / std::sqrt(2.0))) < 1e-15);
  CHECK(std::abs(s[2] - Complex(1.0 / std::sqrt(2.0))) < 1e-15);
  for (const MagneticField b : {MagneticField{0, 0}, MagneticField{100, 70}, MagneticField{3, 99}}) {
    const auto es = ms0_eigensystem(b, reg.d12, reg.constants.gamma_c);
    CHECK((es.states[1].amplitudes() - s.amplitudes()).norm() < 1e-15);
    CHECK((h_ms0(b, reg) * s.amplitudes()).norm() < 1e-15);
  }
}

TEST_CASE("coefficient gauge keeps xi nonnegative") {
  const auto reg = reg2();
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> bx(0.0, 150.0), bz(-100.0, 100.0);
  for (int trial = 0; trial < 50; ++trial) {
    const auto es = ms0_eigensystem({bx(rng), bz(rng)}, reg.d12, reg.constants.gamma_c);
    for (int k : {0, 2, 3}) CHECK(es.xi[k] >= 0.0);
  }
}

TEST_CASE("singular field points fall back to the null-space construction") {
  const auto reg = reg2();
  const double gc = reg.constants.gamma_c;
  const double b1 = singlet_degeneracy_bz(0.0, reg.d12, gc);
  for (const MagneticField b : {MagneticField{0, 5}, MagneticField{100, 0}, MagneticField{0, 0}, MagneticField{0, b1}}) {
    const auto es = ms0_eigensystem(b, reg.d12, gc);
    const Operator h = h_ms0(b, reg);
    for (int k = 0; k < 4; ++k) {
      const ComplexVector v = es.states[k].amplitudes();
      CHECK((h * v - es.energies[k] * v).norm() < 1e-12 * scale_of(b, reg));
      for (int m = 0; m < k; ++m) CHECK(std::abs(es.states[m].inner(es.states[k])) < 1e-9);
    }
  }
}

TEST_CASE("singlet degeneracy field puts psi_3 at zero energy") {
  const auto reg = reg2();
  const double gc = reg.constants.gamma_c;
  const double bz = singlet_degeneracy_bz(100.0, reg.d12, gc);
  CHECK(bz > 70.0);
  CHECK(bz < 71.0);
  const auto es = ms0_eigensystem({100.0, bz}, reg.d12, gc);
  CHECK(std::abs(es.energies[2]) <= 1e-10 * std::abs(es.energies[0]));
  // psi_3 energy changes sign across the point
  const auto lo = ms0_eigensystem({100.0, bz - 1.0}, reg.d12, gc);
  const auto hi = ms0_eigensystem({100.0, bz + 1.0}, reg.d12, gc);
  CHECK(lo.energies[2] * hi.energies[2] < 0.0);
}

TEST_CASE("bipartite mixing angle is half the field polar angle") {
  const auto reg = RegisterConfig::single_carbon();
  for (const MagneticField b : {MagneticField{100, 10}, MagneticField{20, 80}, MagneticField{150, 0.5}}) {
    const auto es = bipartite_eigensystem(b, reg);
    CHECK(es.mixing_theta == doctest::Approx(0.5 * std::atan2(b.bx, b.bz)).epsilon(1e-12));
    const Operator h = h_bipartite(b, reg);
    for (int k = 0; k < 2; ++k) {
      const ComplexVector v = es.states[k].amplitudes();
      CHECK((h * v - es.energies[k] * v).norm() < 1e-12);
    }
    const auto num = numerical_eig(h);
    std::vector<double> e(es.energies.begin(), es.energies.end());
    std::sort(e.begin(), e.end());
    for (int k = 0; k < 6; ++k) CHECK(std::abs(e[k] - num.energies(k)) < 1e-9 * std::abs(num.energies(5)));
  }
  const auto es = bipartite_eigensystem({100, 10}, reg);
  CHECK(es.mixing_theta == doctest::Approx(0.7356).epsilon(1e-3));
  CHECK(es.hyperfine_ratio == doctest::Approx(10.0));
  CHECK_FALSE(es.weak_hyperfine);
  CHECK(bipartite_eigensystem({200, 10}, reg).weak_hyperfine);
}

TEST_CASE("label_states recovers a permutation of reference states") {
  const auto reg = reg2();
  const MagneticField b{100.0, 40.0};
  const auto es = ms0_eigensystem(b, reg.d12, reg.constants.gamma_c);
  const auto num = numerical_eig(h_ms0(b, reg));
  const auto lab = label_states(num, es.states);
  for (int k = 0; k < 4; ++k) {
    CHECK(lab.overlap[k] > 1.0 - 1e-10);
    CHECK(std::abs(num.energies(lab.index[k]) - es.energies[k]) < 1e-9);
  }
}

TEST_CASE("label_states resolves a degenerate pair by projection") {
  const auto reg = reg2();
  const double gc = reg.constants.gamma_c;
  const MagneticField b{100.0, singlet_degeneracy_bz(100.0, reg.d12, gc)};
  const auto es = ms0_eigensystem(b, reg.d12, gc);
  const auto num = numerical_eig(h_ms0(b, reg));
  const auto lab = label_states(num, es.states, 0.9, 1e-6);
  CHECK(std::abs(lab.representatives[1].inner(es.states[1])) == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(std::abs(lab.representatives[2].inner(es.states[2])) == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(std::abs(lab.representatives[1].inner(lab.representatives[2])) < 1e-9);
}
