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

#include "nvdfs/error.hpp"
#include "nvdfs/protocols.hpp"

using namespace nvdfs;

namespace {

double peak(const std::vector<double>& v) { return *std::max_element(v.begin(), v.end()); }

void check_conserved(const ProtocolResult& r) {
  INFO(r.name);
  CHECK(r.conservation.max_trace_error <= 1e-8);
  CHECK(r.conservation.max_hermiticity_residual <= 1e-10);
  CHECK(r.conservation.min_eigenvalue >= -1e-8);
  for (std::size_t k = 1; k < r.trajectory.times.size(); ++k) {
    CHECK(r.trajectory.times[k] > r.trajectory.times[k - 1]);
  }
}

}  // namespace

TEST_CASE("preparation transfers |uu> into the singlet") {
  const auto r = run_preparation({});
  check_conserved(r);
  CHECK(r.final_fidelity == doctest::Approx(0.874).epsilon(0.03 / 0.874));
  CHECK(r.timing.ramp_time == doctest::Approx(95.0 / 7.0 + 6.5));
  CHECK(r.timing.total_time == doctest::Approx(r.timing.ramp_time + 30.0));
  CHECK(r.metric("min_adiabatic_overlap") > 0.9);
  CHECK(r.flags.empty());
  CHECK(r.peak_intermediate_population < 0.1);
  CHECK(r.trajectory.times.front() == 0.0);
  CHECK(r.trajectory.times.back() == doctest::Approx(r.timing.total_time));
  CHECK(r.trajectory.has_observable("pop_psi8"));
}

TEST_CASE("preparation is deterministic and dissipation only lowers fidelity") {
  PreparationParams p;
  p.solver.report_points = 60;
  const auto a = run_preparation(p);
  const auto b = run_preparation(p);
  CHECK(a.trajectory.observable("fidelity") == b.trajectory.observable("fidelity"));
  p.dephasing = DephasingMode::none;
  const auto clean = run_preparation(p);
  check_conserved(clean);
  CHECK(clean.final_fidelity > a.final_fidelity);
}

TEST_CASE("preparation flags non-adiabatic ramps") {
  PreparationParams p;
  p.bx_rate = 500.0;
  p.bz_rate = -500.0;
  p.solver.report_points = 60;
  const auto r = run_preparation(p);
  CHECK(r.metric("min_adiabatic_overlap") < 0.9);
  CHECK_FALSE(r.flags.empty());
}

TEST_CASE("logic flip in both directions") {
  LogicFlipParams p;
  const auto up = run_logic_flip(p);
  check_conserved(up);
  CHECK(up.final_fidelity == doctest::Approx(0.906).epsilon(0.03 / 0.906));
  CHECK(up.timing.ramp_time > 0.0);
  p.direction = FlipDirection::one_to_zero;
  const auto down = run_logic_flip(p);
  check_conserved(down);
  CHECK(down.final_fidelity == doctest::Approx(0.906).epsilon(0.03 / 0.906));
  CHECK(down.timing.ramp_time == 0.0);
  CHECK(parse_direction("one_to_zero") == FlipDirection::one_to_zero);
  CHECK_THROWS_AS(parse_direction("sideways"), DomainError);
}

TEST_CASE("b-STIRAP populates m_s = +1 far more than STIRAP") {
  const auto d = run_stirap_vs_bstirap({});
  check_conserved(d.stirap);
  check_conserved(d.b_stirap);
  CHECK(d.stirap.trajectory.times == d.b_stirap.trajectory.times);
  const double s = peak(d.stirap.trajectory.observable("pop_ms1"));
  const double b = peak(d.b_stirap.trajectory.observable("pop_ms1"));
  CHECK(s < b);
  CHECK(b > 0.5);
  CHECK(d.stirap.final_fidelity > d.b_stirap.final_fidelity);
}

TEST_CASE("single-carbon transfer") {
  const auto r = run_single_c13({});
  check_conserved(r);
  CHECK(r.metric("mixing_theta_rad") == doctest::Approx(0.7356).epsilon(1e-3));
  CHECK(r.metric("hyperfine_ratio") == doctest::Approx(10.0));
  CHECK(r.final_fidelity > 0.5);
  CHECK(r.final_fidelity <= 1.0);
  SingleC13Params p;
  p.reg = RegisterConfig::two_carbon();
  CHECK_THROWS_AS(run_single_c13(p), DimensionError);
}

TEST_CASE("DFS orderings at 100 us") {
  DfsParams p;
  p.solver.report_points = 21;
  const auto rs = run_dfs_comparison(p);
  REQUIRE(rs.size() == 4);
  auto find = [&](const std::string& n) {
    for (const auto& r : rs) {
      if (r.name == n) return r.metric("final_bloch_length");
    }
    FAIL("missing " << n);
    return 0.0;
  };
  for (const auto& r : rs) check_conserved(r);
  CHECK(find("dfs_independent") > find("bare_independent"));
  CHECK(find("dfs_common") > find("dfs_independent"));
  CHECK(find("bare_common") < find("bare_independent"));
  p.variants = {DephasingMode::none};
  p.preparation = "plus";
  const auto clean = run_dfs_comparison(p);
  REQUIRE(clean.size() == 2);
  // the singlet-anchored pair is degenerate at the default field: no coherent leakage
  CHECK(clean[0].name == "dfs_none");
  CHECK(clean[0].metric("final_bloch_length") == doctest::Approx(1.0).epsilon(1e-6));
  p.preparation = "sideways";
  CHECK_THROWS_AS(run_dfs_comparison(p), DomainError);
}

TEST_CASE("intuitive baseline without the timing search") {
  IntuitiveParams p;
  p.scan = false;
  p.solver.report_points = 61;
  const auto r = run_intuitive_baseline(p);
  check_conserved(r);
  CHECK(r.final_fidelity == doctest::Approx(0.52).epsilon(0.05 / 0.52));
  CHECK(r.metric("pump_center_us") == 8.0);
  CHECK(r.metric("delay_us") == 16.0);
  p.dephasing = DephasingMode::none;
  CHECK(run_intuitive_baseline(p).final_fidelity > 0.9);
}

TEST_CASE("singlet dark residual") {
  CHECK(singlet_dark_residual(RegisterConfig::two_carbon()) <= 1e-14);
}

TEST_CASE("protocols reject impossible windows") {
  PreparationParams p;
  p.pulses.window = 10.0;
  CHECK_THROWS_AS(run_preparation(p), DomainError);
}
