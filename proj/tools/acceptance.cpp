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

// Acceptance harness. Prints one PASS/FAIL line per criterion.
//
//   nvdfs_acceptance            all criteria
//   nvdfs_acceptance 4 9        selected criteria
//
// Exit status is 0 when every selected criterion passes.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iterator>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "../tests/support.hpp"
#include "nvdfs/config.hpp"
#include "nvdfs/dispatch.hpp"
#include "nvdfs/eigensolve.hpp"
#include "nvdfs/lindblad.hpp"
#include "nvdfs/protocols.hpp"
#include "nvdfs/system_model.hpp"

using namespace nvdfs;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    if (!detail.empty()) detail += "; ";
    detail += what;
    if (!ok) {
      pass = false;
      detail += " [x]";
    }
  }
};

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

double peak(const std::vector<double>& v) { return v.empty() ? 0.0 : *std::max_element(v.begin(), v.end()); }

bool within(double v, double centre, double tol) { return std::abs(v - centre) <= tol; }

// Protocol runs shared between criteria, computed on first use.
class Runs {
 public:
  const ProtocolResult& preparation() {
    if (!prep_) {
      const auto t0 = std::chrono::steady_clock::now();
      prep_ = run_preparation(PreparationParams{});
      prep_seconds_ = seconds_since(t0);
    }
    return *prep_;
  }
  double preparation_seconds() {
    preparation();
    return prep_seconds_;
  }
  const ProtocolResult& flip(FlipDirection d) {
    auto& slot = d == FlipDirection::zero_to_one ? up_ : down_;
    if (!slot) {
      LogicFlipParams p;
      p.direction = d;
      slot = run_logic_flip(p);
    }
    return *slot;
  }
  const Discrimination& discrimination() {
    if (!disc_) disc_ = run_stirap_vs_bstirap(LogicFlipParams{});
    return *disc_;
  }
  const ProtocolResult& single_c13() {
    if (!single_) single_ = run_single_c13(SingleC13Params{});
    return *single_;
  }
  const ProtocolResult& intuitive() {
    if (!intuitive_) intuitive_ = run_intuitive_baseline(IntuitiveParams{});
    return *intuitive_;
  }
  const ProtocolResult& intuitive_clean() {
    if (!clean_) {
      const auto& r = intuitive();
      IntuitiveParams p;
      p.scan = false;
      p.pump_center = r.metric("pump_center_us");
      p.delay = r.metric("delay_us");
      p.dephasing = DephasingMode::none;
      clean_ = run_intuitive_baseline(p);
    }
    return *clean_;
  }
  const std::vector<ProtocolResult>& dfs() {
    if (!dfs_) dfs_ = run_dfs_comparison(DfsParams{});
    return *dfs_;
  }

  std::vector<const ProtocolResult*> all() {
    std::vector<const ProtocolResult*> out{&preparation(),
                                           &flip(FlipDirection::zero_to_one),
                                           &flip(FlipDirection::one_to_zero),
                                           &discrimination().stirap,
                                           &discrimination().b_stirap,
                                           &single_c13(),
                                           &intuitive(),
                                           &intuitive_clean()};
    for (const auto& r : dfs()) out.push_back(&r);
    return out;
  }

 private:
  std::optional<ProtocolResult> prep_, up_, down_, single_, intuitive_, clean_;
  std::optional<Discrimination> disc_;
  std::optional<std::vector<ProtocolResult>> dfs_;
  double prep_seconds_ = 0.0;
};

Outcome criterion_1(Runs&) {
  Outcome o;
  const auto reg = RegisterConfig::two_carbon();
  const auto singlet = singlet_state();
  const auto t0 = std::chrono::steady_clock::now();
  double worst_energy = 0.0, worst_overlap = 1.0, worst_e2 = 0.0, worst_singlet = 0.0;
  for (int i = 0; i < 50; ++i) {
    for (int j = 0; j < 50; ++j) {
      const MagneticField b{150.0 * i / 49.0, 100.0 * j / 49.0};
      const auto es = ms0_eigensystem(b, reg.d12, reg.constants.gamma_c);
      const auto num = numerical_eig(h_ms0(b, reg));
      const double scale = num.energies.cwiseAbs().maxCoeff();
      const double tol = 1e-9 * scale;
      for (int k = 0; k < 4; ++k) {
        double nearest = INFINITY, weight = 0.0;
        for (int m = 0; m < 4; ++m) {
          const double gap = std::abs(num.energies(m) - es.energies[k]);
          nearest = std::min(nearest, gap);
          if (gap <= tol) weight += std::norm(num.states[m].inner(es.states[k]));
        }
        worst_energy = std::max(worst_energy, nearest / scale);
        worst_overlap = std::min(worst_overlap, weight);
      }
      worst_e2 = std::max(worst_e2, std::abs(es.energies[1]));
      worst_singlet = std::max(worst_singlet, (es.states[1].amplitudes() - singlet.amplitudes()).norm());
    }
  }
  const double elapsed = seconds_since(t0);
  o.require(worst_energy <= 1e-9, "max rel energy error " + fmt("%.2e", worst_energy));
  o.require(worst_overlap >= 1.0 - 1e-8, "min overlap 1-" + fmt("%.2e", 1.0 - worst_overlap));
  o.require(worst_e2 == 0.0, "max |E2| " + fmt("%.1e", worst_e2));
  o.require(worst_singlet <= 1e-15, "psi2-singlet " + fmt("%.1e", worst_singlet));
  o.require(elapsed < 5.0, "runtime " + fmt("%.3f", elapsed) + " s");
  return o;
}

Outcome criterion_2(Runs&) {
  Outcome o;
  const auto reg = RegisterConfig::two_carbon();
  const double gc = reg.constants.gamma_c;
  const double bz = singlet_degeneracy_bz(100.0, units::khz(4.0), gc);
  const auto es = ms0_eigensystem({100.0, bz}, units::khz(4.0), gc);
  const double ratio = std::abs(es.energies[2]) / std::abs(es.energies[0]);
  o.require(bz >= 70.0 && bz <= 71.0, "B1 " + fmt("%.6f", bz) + " G");
  o.require(ratio <= 1e-10, "|E3|/|E1| " + fmt("%.2e", ratio));
  return o;
}

Outcome criterion_3(Runs&) {
  Outcome o;
  const auto t0 = std::chrono::steady_clock::now();
  const auto n = spin_half_operators();
  const std::vector<int> dims{2, 2};
  const Operator iz1 = embed(n.iz, 0, dims), iz2 = embed(n.iz, 1, dims);
  double worst = 0.0;
  bool conserved = true;
  for (std::uint64_t seed : {11u, 23u, 47u}) {
    std::mt19937_64 rng(seed);
    const std::vector<Channel> ch{{1.0 / 7.0, iz1 - iz2, "Sz"}, {1.0 / 500.0, iz1, "Iz1"}, {1.0 / 700.0, iz2, "Iz2"}};
    std::vector<Operator> hs;
    for (int k = 0; k < 5; ++k) hs.push_back(testing::random_hermitian(4, rng, 0.8));
    auto segment = [](double t) { return std::min(4, static_cast<int>(t / 20.0)); };
    const MasterEquation eq([&](double t) { return hs[segment(t)]; }, ch);
    const Operator rho0 = testing::random_density(4, rng);
    std::vector<double> times;
    for (int k = 0; k <= 50; ++k) times.push_back(2.0 * k);
    IntegratorOptions opt;
    const auto traj = integrate(rho0, eq, times, opt);
    Operator exact = rho0;
    for (std::size_t k = 1; k < times.size(); ++k) {
      const double mid = 0.5 * (times[k - 1] + times[k]);
      exact = testing::propagate_exact(exact, testing::vectorized_liouvillian(hs[segment(mid)], ch), times[k] - times[k - 1]);
      worst = std::max(worst, testing::max_norm(traj.states[k] - exact));
    }
    conserved = conserved && check_conservation(traj.states).ok();
  }
  const double elapsed = seconds_since(t0);
  o.require(worst <= 1e-6, "max-norm deviation " + fmt("%.2e", worst));
  o.require(conserved, "conservation");
  o.require(elapsed < 10.0, "runtime " + fmt("%.3f", elapsed) + " s");
  return o;
}

Outcome criterion_4(Runs& runs) {
  Outcome o;
  const auto& r = runs.preparation();
  o.require(within(r.final_fidelity, 0.874, 0.03), "fidelity " + fmt("%.4f", r.final_fidelity));
  o.require(within(r.timing.ramp_time, 20.0, 0.5), "ramp " + fmt("%.3f", r.timing.ramp_time) + " us");
  o.require(within(r.timing.total_time, 50.0, 1.0), "total " + fmt("%.3f", r.timing.total_time) + " us");
  const double s = runs.preparation_seconds();
  o.require(s < 60.0, "runtime " + fmt("%.2f", s) + " s");
  return o;
}

Outcome criterion_5(Runs& runs) {
  Outcome o;
  const auto& up = runs.flip(FlipDirection::zero_to_one);
  const auto& down = runs.flip(FlipDirection::one_to_zero);
  o.require(within(up.final_fidelity, 0.906, 0.03), "0->1 fidelity " + fmt("%.4f", up.final_fidelity));
  o.require(within(down.final_fidelity, 0.906, 0.03), "1->0 fidelity " + fmt("%.4f", down.final_fidelity));
  const auto& d = runs.discrimination();
  const double s = peak(d.stirap.trajectory.observable("pop_ms1"));
  const double b = peak(d.b_stirap.trajectory.observable("pop_ms1"));
  o.require(s < b, "peak ms1 STIRAP " + fmt("%.4f", s) + " < b-STIRAP " + fmt("%.4f", b));
  return o;
}

Outcome criterion_6(Runs& runs) {
  Outcome o;
  const auto& r = runs.single_c13();
  const double phi4 = peak(r.trajectory.observable("pop_phi4"));
  const double theta = bipartite_eigensystem({100.0, 10.0}, RegisterConfig::single_carbon()).mixing_theta;
  o.require(within(r.final_fidelity, 0.96, 0.02), "fidelity " + fmt("%.4f", r.final_fidelity));
  o.require(phi4 < 0.02, "peak phi4 " + fmt("%.4f", phi4));
  o.require(within(theta, 0.74, 0.01), "theta " + fmt("%.4f", theta) + " rad");
  o.require(r.trajectory.times.back() - r.trajectory.times.front() <= 30.0 + 1e-9,
            "window " + fmt("%.1f", r.trajectory.times.back() - r.trajectory.times.front()) + " us");
  return o;
}

Outcome criterion_7(Runs& runs) {
  Outcome o;
  const auto& r = runs.intuitive();
  o.require(within(r.final_fidelity, 0.52, 0.05), "fidelity " + fmt("%.4f", r.final_fidelity) + " at centre " +
                                                      fmt("%g", r.metric("pump_center_us")) + " delay " +
                                                      fmt("%g", r.metric("delay_us")));
  const auto& c = runs.intuitive_clean();
  o.require(c.final_fidelity > 0.9, "dissipation off " + fmt("%.4f", c.final_fidelity));
  return o;
}

Outcome criterion_8(Runs& runs) {
  Outcome o;
  std::map<std::string, double> l;
  for (const auto& r : runs.dfs()) l[r.name] = r.metric("final_bloch_length");
  o.require(l["dfs_independent"] > l["bare_independent"],
            "L(dfs,ind) " + fmt("%.4f", l["dfs_independent"]) + " > L(bare,ind) " + fmt("%.4f", l["bare_independent"]));
  o.require(l["dfs_common"] > l["dfs_independent"], "L(dfs,com) " + fmt("%.4f", l["dfs_common"]) + " > L(dfs,ind)");
  o.require(l["bare_common"] < l["bare_independent"], "L(bare,com) " + fmt("%.4f", l["bare_common"]) + " < L(bare,ind)");
  return o;
}

// Common-reservoir dissipator on the singlet, built from Pauli matrices.
double singlet_residual_oracle(const RegisterConfig& reg) {
  Operator z(2, 2);
  z << 0.5, 0.0, 0.0, -0.5;
  const Operator id = Operator::Identity(2, 2);
  Operator l(4, 4);
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b)
      for (int c = 0; c < 2; ++c)
        for (int d = 0; d < 2; ++d) l(2 * a + b, 2 * c + d) = z(a, c) * id(b, d) + id(a, c) * z(b, d);
  ComplexVector s = ComplexVector::Zero(4);
  s(1) = -1.0 / std::sqrt(2.0);
  s(2) = 1.0 / std::sqrt(2.0);
  const Operator rho = s * s.adjoint();
  const double rate = 1.0 / reg.carbons[0].t2n_star;
  const Operator d = rate * (2.0 * l * rho * l - l * l * rho - rho * l * l);
  return d.cwiseAbs().maxCoeff();
}

Outcome criterion_9(Runs& runs) {
  Outcome o;
  ConservationReport all;
  int count = 0;
  for (const auto* r : runs.all()) {
    all.merge(check_conservation(r->trajectory.states));
    ++count;
  }
  o.require(all.max_trace_error <= 1e-8, std::to_string(count) + " runs; max |Tr-1| " + fmt("%.1e", all.max_trace_error));
  o.require(all.max_hermiticity_residual <= 1e-10, "herm " + fmt("%.1e", all.max_hermiticity_residual));
  o.require(all.min_eigenvalue >= -1e-8, "min eig " + fmt("%.1e", all.min_eigenvalue));
  const auto reg = RegisterConfig::two_carbon();
  const double lib = singlet_dark_residual(reg);
  const double oracle = singlet_residual_oracle(reg);
  o.require(lib <= 1e-14 && oracle <= 1e-14, "singlet residual " + fmt("%.1e", lib) + " (oracle " + fmt("%.1e", oracle) + ")");
  return o;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

Outcome criterion_10(Runs&) {
  Outcome o;
  namespace fs = std::filesystem;
  const fs::path base = fs::temp_directory_path() / ("nvdfs_acceptance_" + std::to_string(std::random_device{}()));
  const auto cfg = parse_config("{}", "prepare");
  const auto a = dispatch(cfg, {(base / "a").string(), 1});
  const auto b = dispatch(cfg, {(base / "b").string(), 1});
  const std::string ca = slurp(a.directory / "trajectory.csv");
  const std::string cb = slurp(b.directory / "trajectory.csv");
  std::error_code ec;
  fs::remove_all(base, ec);
  o.require(!ca.empty(), "csv bytes " + std::to_string(ca.size()));
  o.require(ca == cb, "identical");
  return o;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"nvdfs acceptance criteria"};
  std::vector<int> selected;
  app.add_option("criteria", selected, "criterion numbers (default: all)")->check(CLI::Range(1, 10));
  CLI11_PARSE(app, argc, argv);
  if (selected.empty()) {
    for (int k = 1; k <= 10; ++k) selected.push_back(k);
  }
  const std::vector<std::function<Outcome(Runs&)>> criteria{criterion_1, criterion_2, criterion_3, criterion_4,
                                                            criterion_5, criterion_6, criterion_7, criterion_8,
                                                            criterion_9, criterion_10};
  Runs runs;
  bool all_pass = true;
  for (int k : std::set<int>(selected.begin(), selected.end())) {
    Outcome o;
    try {
      o = criteria[k - 1](runs);
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string("error: ") + e.what();
    }
    std::printf("criterion %d: %s  %s\n", k, o.pass ? "PASS" : "FAIL", o.detail.c_str());
    std::fflush(stdout);
    all_pass = all_pass && o.pass;
  }
  return all_pass ? 0 : 1;
}
