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

#include <cmath>
#include <numbers>

#include "nvdfs/drive.hpp"
#include "nvdfs/eigensolve.hpp"
#include "nvdfs/error.hpp"
#include "nvdfs/integrator.hpp"
#include "nvdfs/units.hpp"

using namespace nvdfs;

namespace {

constexpr int kPsi1 = 0, kPsi2 = 1, kPsi3 = 2, kPsi6 = 5, kPsi7 = 6;

// Two ground and two excited levels with GHz-free energies, so the lab frame is cheap.
DrivenLevels toy_levels() {
  DrivenLevels l;
  l.energies = Eigen::VectorXd(4);
  l.energies << 0.0, 3.0, 120.0, 125.5;
  l.n_ground = 2;
  l.nuclear_dim = 2;
  l.chi = Operator(2, 2);
  l.chi << 0.8, 0.6, -0.6, 0.8;
  l.frame_basis = Operator::Identity(4, 4);
  return l;
}

std::vector<Operator> schrodinger(const std::function<Operator(double)>& h, const Operator& psi0,
                                  const std::vector<double>& times, double max_step) {
  IntegratorOptions opt;
  opt.rtol = 1e-10;
  opt.atol = 1e-12;
  opt.max_step = max_step;
  return integrate_dopri5([&](double t, const Operator& y, Operator& out) { out = Complex(0, -1) * (h(t) * y); }, psi0,
                          times, opt, nullptr);
}

}  // namespace

TEST_CASE("Gaussian envelope") {
  GaussianPulse p{2.0, 10.0, 3.0, 0.0, PulseRole::pump};
  CHECK(p.envelope(10.0) == 2.0);
  CHECK(p.envelope(13.0) == doctest::Approx(2.0 * std::exp(-0.5)));
  CHECK(p.envelope(7.0) == doctest::Approx(p.envelope(13.0)));
  p.sigma = 0.0;
  CHECK_THROWS_AS(p.validate(), DomainError);
}

TEST_CASE("minimum STIRAP span meets the boundary ratio exactly") {
  for (double sigma : {1.0, 5.0, 9.0}) {
    for (double ratio : {0.05, 0.1, 0.3}) {
      const double span = minimum_stirap_span(sigma, ratio);
      const auto plan = make_stirap_plan(1.0, sigma, PulseOrdering::stirap, 0.0, span, ratio);
      const double early = plan.amplitude(PulseRole::pump, 0.0) / plan.amplitude(PulseRole::stokes, 0.0);
      const double late = plan.amplitude(PulseRole::stokes, span) / plan.amplitude(PulseRole::pump, span);
      CHECK(early == doctest::Approx(ratio).epsilon(1e-9));
      CHECK(late == doctest::Approx(ratio).epsilon(1e-9));
    }
  }
  CHECK(minimum_stirap_span(5.0, 0.1) == doctest::Approx(std::sqrt(2.0) * 5.0 * std::log(10.0)));
  CHECK_THROWS_AS(make_stirap_plan(1.0, 5.0, PulseOrdering::stirap, 0.0, 16.0, 0.1), DomainError);
  CHECK_THROWS_AS(minimum_stirap_span(5.0, 1.0), DomainError);
}

TEST_CASE("pulse ordering and separation") {
  const auto s = make_stirap_plan(1.0, 5.0, PulseOrdering::stirap, 0.0, 30.0);
  CHECK(s.pulse(PulseRole::stokes).center < s.pulse(PulseRole::pump).center);
  CHECK(s.pulse(PulseRole::pump).center - s.pulse(PulseRole::stokes).center == doctest::Approx(5.0 * std::sqrt(2.0)));
  CHECK(0.5 * (s.pulse(PulseRole::pump).center + s.pulse(PulseRole::stokes).center) == doctest::Approx(15.0));
  const auto b = make_stirap_plan(1.0, 5.0, PulseOrdering::b_stirap, 0.0, 30.0);
  CHECK(b.pulse(PulseRole::pump).center < b.pulse(PulseRole::stokes).center);
  // counter-intuitive: the Stokes envelope dominates early and the pump late
  CHECK(s.amplitude(PulseRole::stokes, 1.0) > s.amplitude(PulseRole::pump, 1.0));
  CHECK(s.amplitude(PulseRole::pump, 29.0) > s.amplitude(PulseRole::stokes, 29.0));
  const auto in = make_intuitive_plan(0.5, 5.5, 2.8, 0.0, 30.0, 8.0, 16.0);
  CHECK(in.pulse(PulseRole::stokes).center == 24.0);
  CHECK(in.pulse(PulseRole::stokes).sigma == 2.8);
  CHECK_THROWS_AS(make_intuitive_plan(0.5, 5.5, 2.8, 0.0, 30.0, 20.0, 16.0), DomainError);
  CHECK(parse_ordering("b_stirap") == PulseOrdering::b_stirap);
  CHECK_THROWS_AS(parse_ordering("x"), DomainError);
}

TEST_CASE("transition coefficients of the singlet") {
  const auto reg = RegisterConfig::two_carbon();
  for (const MagneticField b : {MagneticField{100, 70}, MagneticField{5, 70}, MagneticField{100, 5}}) {
    const auto levels = tripartite_levels(b, reg);
    CHECK(levels.chi(kPsi6 - 4, kPsi2).real() == doctest::Approx(1.0 / std::sqrt(2.0)));
    CHECK(levels.chi(kPsi7 - 4, kPsi2).real() == doctest::Approx(-1.0 / std::sqrt(2.0)));
    // complete excited basis: every ground state has unit total transition weight
    for (int n = 0; n < 4; ++n) CHECK(levels.chi.col(n).squaredNorm() == doctest::Approx(1.0).epsilon(1e-12));
    const auto full = tripartite_levels(b, reg, Ms1Model::full);
    for (int n = 0; n < 4; ++n) CHECK(full.chi.col(n).squaredNorm() == doctest::Approx(1.0).epsilon(1e-9));
  }
}

TEST_CASE("chi_coefficients rejects a non-Hermitian coupling") {
  Operator v = nv_coupling_operator(2);
  v(0, 2) = 2.0;
  const std::vector<StateVector> e{StateVector::basis(4, 0)};
  const std::vector<StateVector> g{StateVector::basis(4, 2)};
  CHECK_THROWS_AS(chi_coefficients(e, g, v), DomainError);
  CHECK(std::abs(chi_coefficients(e, g, nv_coupling_operator(2))(0, 0) - 1.0) < 1e-15);
}

TEST_CASE("rotating frame detunings") {
  const auto levels = toy_levels();
  const auto f = make_frame(levels, 0, 1, 2, 0.2, -0.1);
  CHECK(f.delta == doctest::Approx(0.3));
  CHECK(f.detunings(0) == doctest::Approx(0.0));
  CHECK(f.detunings(2) == doctest::Approx(0.2));
  CHECK(f.detunings(1) == doctest::Approx(0.3));
  CHECK(f.omega_p == doctest::Approx(120.0 - 0.2));
  CHECK(f.omega_s == doctest::Approx(117.0 + 0.1));
  validate_frame(levels, f);
  auto broken = f;
  broken.detunings(1) += 1e-3;
  CHECK_THROWS_AS(validate_frame(levels, broken), DomainError);
  CHECK_THROWS_AS(make_frame(levels, 0, 0, 2), DomainError);
  CHECK_THROWS_AS(make_frame(levels, 0, 1, 1), DomainError);
  const auto resonant = make_frame(levels, 0, 1, 2);
  CHECK(resonant.detunings(0) == 0.0);
  CHECK(resonant.detunings(1) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(resonant.detunings(2) == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("rotating Hamiltonian is Hermitian with the RWA couplings") {
  const auto reg = RegisterConfig::two_carbon();
  const MagneticField b{100.0, singlet_degeneracy_bz(100.0, reg.d12, reg.constants.gamma_c)};
  const auto levels = tripartite_levels(b, reg);
  const auto plan = make_stirap_plan(units::mhz(1.0), 5.0, PulseOrdering::stirap, 0.0, 30.0);
  const auto frame = make_frame(levels, kPsi2, kPsi3, kPsi6);
  const RotatingHamiltonian h(levels, plan, frame);
  const RotatingHamiltonian hf(levels, plan, frame, true);
  for (double t : {0.0, 7.3, 15.0, 22.1, 30.0}) {
    CHECK(hermiticity_residual(h(t)) < 1e-15);
    CHECK(hermiticity_residual(hf(t)) < 1e-14);
    const double op = plan.amplitude(PulseRole::pump, t);
    CHECK(std::abs(h(t)(kPsi6, kPsi2) - 0.5 * op * levels.chi(kPsi6 - 4, kPsi2)) < 1e-15);
    // couplings outside the Lambda are absent without the full-coupling toggle
    CHECK(std::abs(h(t)(kPsi6, kPsi1)) == 0.0);
  }
}

TEST_CASE("rotating-frame evolution matches the lab frame up to counter-rotating corrections") {
  const auto levels = toy_levels();
  const double omega0 = 2.0;
  const auto plan = make_stirap_plan(omega0, 4.0, PulseOrdering::stirap, 0.0, 20.0);
  const auto frame = make_frame(levels, 0, 1, 2);
  const RotatingHamiltonian rot(levels, plan, frame, true);
  const LabFrameHamiltonian lab(levels, plan, frame);
  Operator psi0 = Operator::Zero(4, 1);
  psi0(0, 0) = 1.0;
  const std::vector<double> times{0.0, 5.0, 10.0, 15.0, 20.0};
  const auto r = schrodinger([&](double t) { return rot(t); }, psi0, times, 0.01);
  const auto l = schrodinger([&](double t) { return lab(t); }, psi0, times, 0.002);
  for (std::size_t k = 0; k < times.size(); ++k) {
    const Operator mapped = lab.frame_unitary(times[k]) * r[k];
    // populations differ at order Omega / (2 omega) ~ 1e-2; phases also pick up the Bloch-Siegert shift
    CHECK((mapped.cwiseAbs2() - l[k].cwiseAbs2()).cwiseAbs().maxCoeff() < 2e-2);
    CHECK((mapped - l[k]).cwiseAbs().maxCoeff() < 1e-1);
    CHECK(std::abs(r[k].norm() - 1.0) < 1e-8);
  }
  // transfer happened in both pictures
  CHECK(std::norm(l.back()(1, 0)) > 0.5);
}

TEST_CASE("bipartite levels") {
  const auto reg = RegisterConfig::single_carbon();
  const auto levels = bipartite_levels({100.0, 10.0}, reg);
  CHECK(levels.size() == 4);
  CHECK(levels.n_ground == 2);
  const double th = bipartite_eigensystem({100.0, 10.0}, reg).mixing_theta;
  // phi_3 = |+1, up>: <phi_3|V|phi_1> = cos(theta), <phi_3|V|phi_2> = sin(theta)
  CHECK(std::abs(levels.chi(0, 0)) == doctest::Approx(std::cos(th)));
  CHECK(std::abs(levels.chi(0, 1)) == doctest::Approx(std::sin(th)));
}
