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

#include "nvdfs/protocols.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <sstream>

#include "nvdfs/eigensolve.hpp"
#include "nvdfs/error.hpp"

namespace nvdfs {

namespace {

constexpr int kPsi2 = 1;
constexpr int kPsi3 = 2;
constexpr int kPsi6 = 5;

using ObservableFn = std::function<std::vector<double>(double, const Operator&)>;

// Concatenates stage trajectories onto one protocol time axis.
class Recorder {
 public:
  explicit Recorder(std::vector<std::string> names) : names_(std::move(names)), values_(names_.size()) {}

  void append(double offset, const Trajectory& stage, const ObservableFn& observe) {
    const std::size_t first = out_.times.empty() ? 0 : 1;
    for (std::size_t k = first; k < stage.size(); ++k) {
      out_.times.push_back(offset + stage.times[k]);
      out_.states.push_back(stage.states[k]);
      const auto v = observe(stage.times[k], stage.states[k]);
      if (v.size() != names_.size()) throw DimensionError("recorder: observable count mismatch");
      for (std::size_t j = 0; j < v.size(); ++j) values_[j].push_back(v[j]);
    }
  }

  Trajectory finish() {
    for (std::size_t j = 0; j < names_.size(); ++j) out_.add_observable(names_[j], std::move(values_[j]));
    return std::move(out_);
  }

 private:
  std::vector<std::string> names_;
  std::vector<std::vector<double>> values_;
  Trajectory out_;
};

int stage_points(double duration, double total, int report_points) {
  if (report_points < 2) throw DomainError("report_points must be at least 2");
  const long n = std::lround(static_cast<double>(report_points) * duration / total);
  return static_cast<int>(std::max(2L, n));
}

void accumulate(IntegrationStats& total, const IntegrationStats& s) {
  total.smallest_step = total.accepted == 0 ? s.smallest_step : std::min(total.smallest_step, s.smallest_step);
  total.largest_step = std::max(total.largest_step, s.largest_step);
  total.accepted += s.accepted;
  total.rejected += s.rejected;
  total.rhs_evaluations += s.rhs_evaluations;
}

std::vector<Operator> nuclear_iz(std::size_t n_carbons) {
  const std::vector<int> dims(n_carbons, 2);
  const auto s = spin_half_operators();
  std::vector<Operator> out;
  for (std::size_t c = 0; c < n_carbons; ++c) out.push_back(embed(s.iz, c, dims));
  return out;
}

std::vector<Channel> ms0_channels(const DissipatorSpec& spec, std::size_t n_carbons) {
  const auto iz = nuclear_iz(n_carbons);
  return dephasing_channels(spec, Operator(), iz);
}

// Channels on the bare {m_s = +1, m_s = 0} x nuclear basis.
std::vector<Channel> driven_channels(const DissipatorSpec& spec, std::size_t n_carbons) {
  const int nd = 1 << n_carbons;
  Operator sz_nv = Operator::Zero(2, 2);
  sz_nv(0, 0) = 1.0;
  std::vector<Operator> iz;
  for (const auto& op : nuclear_iz(n_carbons)) iz.push_back(kron(identity(2), op));
  return dephasing_channels(spec, kron(sz_nv, identity(nd)), iz);
}

Operator pure(const StateVector& s) { return s.projector(); }

double peak(const std::vector<double>& v) { return v.empty() ? 0.0 : *std::max_element(v.begin(), v.end()); }

double trapezoid(const std::vector<double>& t, const std::vector<double>& y) {
  double sum = 0.0;
  for (std::size_t k = 1; k < t.size(); ++k) sum += 0.5 * (t[k] - t[k - 1]) * (y[k] + y[k - 1]);
  return sum;
}

// Lab-frame m_s = 0 evolution along one linear field segment.
Trajectory ramp_stage(const Operator& rho0, const FieldSegment& seg, const RegisterConfig& reg,
                      const std::vector<Channel>& channels, int points, const IntegratorOptions& opt,
                      IntegrationStats& stats) {
  const FieldSchedule schedule({seg});
  MasterEquation eq([&schedule, &reg](double t) { return h_ms0(schedule.at(t), reg); }, channels);
  const auto grid = uniform_grid(seg.t_start, seg.t_end, points);
  IntegrationStats s;
  auto traj = integrate(rho0, eq, grid, opt, &s);
  accumulate(stats, s);
  return traj;
}

// Rotating-frame evolution in the driven eigenbasis.
Trajectory driven_stage(const Operator& rho0, const RotatingHamiltonian& h, const DissipatorSpec& spec,
                        std::size_t n_carbons, int points, IntegratorOptions opt, IntegrationStats& stats,
                        bool& frame_invariant) {
  const auto& levels = h.levels();
  auto channels = channels_in_basis(driven_channels(spec, n_carbons), levels.frame_basis);
  MasterEquation eq([&h](double t) { return h(t); }, std::move(channels), h.frame().frame_frequencies);
  frame_invariant = eq.frame_invariant();
  double sigma = std::numeric_limits<double>::infinity();
  for (const auto& pulse : h.plan().pulses) sigma = std::min(sigma, pulse.sigma);
  opt.max_step = std::min(opt.max_step, sigma / 20.0);
  const auto grid = uniform_grid(h.plan().t_start, h.plan().t_end, points);
  IntegrationStats s;
  auto traj = integrate(rho0, eq, grid, opt, &s);
  accumulate(stats, s);
  return traj;
}

// Re-expresses an m_s = 0 nuclear density matrix in the driven eigenbasis.
Operator handoff(const Operator& rho_nuclear, const DrivenLevels& levels) {
  const int nd = levels.nuclear_dim;
  Operator bare = Operator::Zero(2 * nd, 2 * nd);
  bare.block(nd, nd, nd, nd) = rho_nuclear;
  return levels.frame_basis.adjoint() * bare * levels.frame_basis;
}

Operator eigen_projector(int dim, int k) {
  Operator rho = Operator::Zero(dim, dim);
  rho(k, k) = 1.0;
  return rho;
}

std::vector<std::string> tripartite_names() {
  std::vector<std::string> names{"fidelity"};
  for (int k = 1; k <= 8; ++k) names.push_back("pop_psi" + std::to_string(k));
  names.push_back("pop_ms1");
  names.push_back("energy");
  return names;
}

// Observables during an m_s = 0 ramp, against instantaneous eigenstates.
ObservableFn ramp_observer(const FieldSchedule& schedule, const RegisterConfig& reg, int target) {
  return [&schedule, &reg, target](double t, const Operator& rho) {
    const MagneticField b = schedule.at(t);
    const auto es = ms0_eigensystem(b, reg.d12, reg.constants.gamma_c);
    const auto pops = populations(rho, es.states);
    std::vector<double> v{pops[target]};
    v.insert(v.end(), pops.begin(), pops.end());
    v.insert(v.end(), 4, 0.0);
    v.push_back(0.0);
    v.push_back(mean_energy(rho, h_ms0(b, reg)));
    return v;
  };
}

ObservableFn driven_observer(const DrivenLevels& levels, int target) {
  return [&levels, target](double, const Operator& rho) {
    std::vector<double> v{rho(target, target).real()};
    double ms1 = 0.0;
    double energy = 0.0;
    for (int k = 0; k < levels.size(); ++k) {
      const double p = rho(k, k).real();
      v.push_back(p);
      if (k >= levels.n_ground) {
        ms1 += p;
      } else {
        energy += p * levels.energies(k);
      }
    }
    v.push_back(ms1);
    v.push_back(energy);
    return v;
  };
}

void require_two_carbons(const RegisterConfig& reg, const char* who) {
  reg.validate();
  if (reg.carbon_count() != 2) throw DimensionError(std::string(who) + ": requires two carbons");
}

Json echo_register(const RegisterConfig& reg) {
  Json carbons = Json::array();
  for (const auto& c : reg.carbons) {
    carbons.push_back({{"A_zz_rad_per_us", c.a_zz}, {"A_ani_rad_per_us", c.a_ani}, {"phi_rad", c.phi},
                       {"T2n_star_us", c.t2n_star}});
  }
  return {{"D_rad_per_us", reg.constants.zero_field_splitting},
          {"gamma_e_rad_per_us_G", reg.constants.gamma_e},
          {"gamma_c_rad_per_us_G", reg.constants.gamma_c},
          {"d12_rad_per_us", reg.d12},
          {"T2e_star_us", reg.t2e_star},
          {"carbons", carbons}};
}

Json echo_solver(const SolverSettings& s) {
  return {{"rtol", s.integrator.rtol},         {"atol", s.integrator.atol},
          {"max_step_us", s.integrator.max_step}, {"min_step_us", s.integrator.min_step},
          {"initial_step_us", s.integrator.initial_step}, {"report_points", s.report_points}};
}

Json echo_pulses(const StirapSettings& s) {
  return {{"omega0_rad_per_us", s.omega0},
          {"sigma_us", s.sigma},
          {"window_us", s.window},
          {"boundary_ratio", s.boundary_ratio}};
}

struct FlipRun {
  int initial;
  int target;
  PulseOrdering ordering;
  std::string name;
};

ProtocolResult run_flip(const LogicFlipParams& p, const FlipRun& run) {
  require_two_carbons(p.reg, "logic flip");
  const double gc = p.reg.constants.gamma_c;
  const double bz_target = p.bz_target.value_or(singlet_degeneracy_bz(p.bx, p.reg.d12, gc));
  const double bz_start = p.bz_start.value_or(run.initial == kPsi2 ? 5.0 : bz_target);
  const MagneticField start{p.bx, bz_start};
  const MagneticField pulse_field{p.bx, bz_target};
  const auto spec = DissipatorSpec::from_register(p.reg, p.dephasing);

  ProtocolResult result;
  result.name = run.name;
  result.parameters = echo(p);
  result.parameters["initial_state"] = "psi" + std::to_string(run.initial + 1);
  result.parameters["target_state"] = "psi" + std::to_string(run.target + 1);
  result.parameters["ordering"] = std::string(to_string(run.ordering));
  result.parameters["bz_start_G"] = bz_start;

  const auto es0 = ms0_eigensystem(start, p.reg.d12, gc);
  Operator rho = pure(es0.states[run.initial]);

  double ramp_time = 0.0;
  std::optional<FieldSchedule> schedule;
  if (bz_target != bz_start) {
    const double rate = std::copysign(std::abs(p.bz_rate), bz_target - bz_start);
    if (p.bz_rate == 0.0) throw DomainError("logic flip: Bz ramp rate must be nonzero");
    schedule = FieldSchedule::Builder(0.0, start).ramp_bz(bz_target, rate).build();
    ramp_time = schedule->t_end();
  }
  const double total = ramp_time + p.pulses.window;
  Recorder rec(tripartite_names());

  if (schedule) {
    const auto channels = ms0_channels(spec, 2);
    const auto& seg = schedule->segments().front();
    const auto traj = ramp_stage(rho, seg, p.reg, channels, stage_points(ramp_time, total, p.solver.report_points),
                                 p.solver.integrator, result.stats);
    rec.append(0.0, traj, ramp_observer(*schedule, p.reg, run.target));
    double worst = 1.0;
    for (std::size_t k = 0; k < traj.size(); ++k) {
      const auto es = ms0_eigensystem(schedule->at(traj.times[k]), p.reg.d12, gc);
      worst = std::min(worst, fidelity(traj.states[k], es.states[run.initial]));
    }
    result.set_metric("min_adiabatic_overlap", worst);
    if (worst < p.adiabatic_threshold) {
      std::ostringstream msg;
      msg << "adiabaticity: overlap with the instantaneous eigenstate fell to " << worst << " during the ramp";
      result.flags.push_back(msg.str());
    }
    rho = traj.states.back();
  }

  const auto levels = tripartite_levels(pulse_field, p.reg, p.ms1_model);
  const auto plan = make_stirap_plan(p.pulses.omega0, p.pulses.sigma, run.ordering, 0.0, p.pulses.window,
                                     p.pulses.boundary_ratio);
  const auto frame = make_frame(levels, run.initial, run.target, kPsi6);
  const RotatingHamiltonian h(levels, plan, frame, p.full_coupling);
  bool invariant = true;
  const auto traj = driven_stage(handoff(rho, levels), h, spec, 2,
                                 stage_points(p.pulses.window, total, p.solver.report_points), p.solver.integrator,
                                 result.stats, invariant);
  rec.append(ramp_time, traj, driven_observer(h.levels(), run.target));
  result.trajectory = rec.finish();

  const auto& tr = result.trajectory;
  result.final_fidelity = tr.observable("fidelity").back();
  result.peak_intermediate_population = peak(tr.observable("pop_psi6"));
  result.timing = {ramp_time, p.pulses.window, total};
  result.conservation = check_conservation(tr.states);

  const auto es = ms0_eigensystem(pulse_field, p.reg.d12, gc);
  result.set_metric("bz_pulse_G", bz_target);
  result.set_metric("peak_ms1_population", peak(tr.observable("pop_ms1")));
  result.set_metric("integrated_ms1_population_us", trapezoid(tr.times, tr.observable("pop_ms1")));
  result.set_metric("logic_splitting_rel", std::abs(es.energies[kPsi3] - es.energies[kPsi2]) / std::abs(es.energies[0]));
  result.set_metric("chi_pump", std::abs(levels.chi(kPsi6 - 4, run.initial)));
  result.set_metric("chi_stokes", std::abs(levels.chi(kPsi6 - 4, run.target)));
  result.set_metric("dissipators_frame_invariant", invariant ? 1.0 : 0.0);
  return result;
}

std::vector<std::pair<std::string, StateVector>> cardinal_states(const StateVector& b0, const StateVector& b1) {
  const auto& a = b0.amplitudes();
  const auto& b = b1.amplitudes();
  const double r = 1.0 / std::numbers::sqrt2;
  const Complex i(0.0, 1.0);
  return {{"zero", b0},
          {"one", b1},
          {"plus", StateVector::preserve_phase(r * (a + b))},
          {"minus", StateVector::preserve_phase(r * (a - b))},
          {"plus_i", StateVector::preserve_phase(r * (a + i * b))},
          {"minus_i", StateVector::preserve_phase(r * (a - i * b))}};
}

}  // namespace

FlipDirection parse_direction(std::string_view tag) {
  if (tag == "zero_to_one") return FlipDirection::zero_to_one;
  if (tag == "one_to_zero") return FlipDirection::one_to_zero;
  throw DomainError("unknown flip direction '" + std::string(tag) + "'");
}

std::string_view to_string(FlipDirection d) {
  return d == FlipDirection::zero_to_one ? "zero_to_one" : "one_to_zero";
}

void ProtocolResult::set_metric(std::string key, double value) {
  for (auto& [k, v] : metrics) {
    if (k == key) {
      v = value;
      return;
    }
  }
  metrics.emplace_back(std::move(key), value);
}

double ProtocolResult::metric(std::string_view key) const {
  for (const auto& [k, v] : metrics) {
    if (k == key) return v;
  }
  throw DomainError("protocol result has no metric '" + std::string(key) + "'");
}

bool ProtocolResult::has_metric(std::string_view key) const {
  return std::any_of(metrics.begin(), metrics.end(), [&](const auto& kv) { return kv.first == key; });
}

Json echo(const DfsParams& p) {
  Json variants = Json::array();
  for (auto v : p.variants) variants.push_back(std::string(to_string(v)));
  return {{"protocol", "dfs-compare"},
          {"register", echo_register(p.reg)},
          {"bx_G", p.bx},
          {"bz_G", p.bz ? Json(*p.bz) : Json("auto")},
          {"duration_us", p.duration},
          {"preparation", p.preparation},
          {"variants", variants},
          {"solver", echo_solver(p.solver)}};
}

Json echo(const PreparationParams& p) {
  return {{"protocol", "prepare"},
          {"register", echo_register(p.reg)},
          {"start_bx_G", p.start.bx},
          {"start_bz_G", p.start.bz},
          {"bx_target_G", p.bx_target},
          {"bx_rate_G_per_us", p.bx_rate},
          {"bz_target_G", p.bz_target},
          {"bz_rate_G_per_us", p.bz_rate},
          {"pulses", echo_pulses(p.pulses)},
          {"dephasing", std::string(to_string(p.dephasing))},
          {"ms1_model", std::string(to_string(p.ms1_model))},
          {"full_coupling", p.full_coupling},
          {"adiabatic_threshold", p.adiabatic_threshold},
          {"solver", echo_solver(p.solver)}};
}

Json echo(const LogicFlipParams& p) {
  return {{"protocol", "logic-flip"},
          {"register", echo_register(p.reg)},
          {"bx_G", p.bx},
          {"bz_start_G", p.bz_start ? Json(*p.bz_start) : Json("auto")},
          {"bz_target_G", p.bz_target ? Json(*p.bz_target) : Json("auto")},
          {"bz_rate_G_per_us", p.bz_rate},
          {"direction", std::string(to_string(p.direction))},
          {"pulses", echo_pulses(p.pulses)},
          {"dephasing", std::string(to_string(p.dephasing))},
          {"ms1_model", std::string(to_string(p.ms1_model))},
          {"full_coupling", p.full_coupling},
          {"adiabatic_threshold", p.adiabatic_threshold},
          {"solver", echo_solver(p.solver)}};
}

Json echo(const SingleC13Params& p) {
  return {{"protocol", "single-c13"},
          {"register", echo_register(p.reg)},
          {"bx_G", p.field.bx},
          {"bz_G", p.field.bz},
          {"pulses", echo_pulses(p.pulses)},
          {"dephasing", std::string(to_string(p.dephasing))},
          {"full_coupling", p.full_coupling},
          {"solver", echo_solver(p.solver)}};
}

Json echo(const IntuitiveParams& p) {
  return {{"protocol", "intuitive"},
          {"register", echo_register(p.reg)},
          {"bx_G", p.field.bx},
          {"bz_G", p.field.bz},
          {"omega0_rad_per_us", p.omega0},
          {"sigma_p_us", p.sigma_p},
          {"sigma_s_us", p.sigma_s},
          {"window_us", p.window},
          {"pump_center_us", p.pump_center},
          {"delay_us", p.delay},
          {"scan", p.scan},
          {"scan_center_us", {p.scan_center_min, p.scan_center_max}},
          {"scan_delay_us", {p.scan_delay_min, p.scan_delay_max}},
          {"scan_step_us", p.scan_step},
          {"scan_margin_us", p.scan_margin},
          {"scan_report_points", p.scan_report_points},
          {"scan_rtol", p.scan_rtol},
          {"scan_atol", p.scan_atol},
          {"dephasing", std::string(to_string(p.dephasing))},
          {"ms1_model", std::string(to_string(p.ms1_model))},
          {"full_coupling", p.full_coupling},
          {"solver", echo_solver(p.solver)}};
}

std::vector<ProtocolResult> run_dfs_comparison(const DfsParams& p) {
  require_two_carbons(p.reg, "dfs comparison");
  if (!(p.duration > 0.0)) throw DomainError("dfs comparison: duration must be positive");
  const double gc = p.reg.constants.gamma_c;
  const MagneticField b{p.bx, p.bz.value_or(singlet_degeneracy_bz(p.bx, p.reg.d12, gc))};
  const Operator h = h_ms0(b, p.reg);
  const auto es = ms0_eigensystem(b, p.reg.d12, gc);

  struct Qubit {
    std::string name;
    StateVector b0, b1;
  };
  const std::vector<Qubit> qubits{
      {"dfs", es.states[kPsi2], es.states[kPsi3]},
      {"bare", StateVector::basis(4, nuclear_pair_index(Nuclear::down, Nuclear::down)),
       StateVector::basis(4, nuclear_pair_index(Nuclear::up, Nuclear::up))}};

  const auto grid = uniform_grid(0.0, p.duration, p.solver.report_points);
  std::vector<ProtocolResult> out;
  for (auto mode : p.variants) {
    const auto spec = DissipatorSpec::from_register(p.reg, mode);
    const MasterEquation eq([&h](double) { return h; }, ms0_channels(spec, 2));
    for (const auto& q : qubits) {
      auto preps = cardinal_states(q.b0, q.b1);
      if (p.preparation != "average") {
        auto it = std::find_if(preps.begin(), preps.end(), [&](const auto& s) { return s.first == p.preparation; });
        if (it == preps.end()) throw DomainError("dfs comparison: unknown preparation '" + p.preparation + "'");
        preps = {*it};
      }
      ProtocolResult r;
      r.name = q.name + "_" + std::string(to_string(mode));
      r.parameters = echo(p);
      r.parameters["qubit"] = q.name;
      r.parameters["dephasing"] = std::string(to_string(mode));
      r.parameters["bz_G"] = b.bz;

      std::vector<double> mean(grid.size(), 0.0);
      std::vector<std::pair<std::string, std::vector<double>>> curves;
      double overlap = 0.0;
      for (const auto& [label, psi] : preps) {
        IntegrationStats s;
        auto traj = integrate(pure(psi), eq, grid, p.solver.integrator, &s);
        accumulate(r.stats, s);
        std::vector<double> len(grid.size());
        for (std::size_t k = 0; k < grid.size(); ++k) len[k] = bloch_length(traj.states[k], q.b0, q.b1);
        for (std::size_t k = 0; k < grid.size(); ++k) mean[k] += len[k] / static_cast<double>(preps.size());
        overlap += fidelity(traj.states.back(), psi) / static_cast<double>(preps.size());
        r.conservation.merge(check_conservation(traj.states));
        if (r.trajectory.states.empty() && (label == "plus" || preps.size() == 1)) {
          r.trajectory.times = traj.times;
          r.trajectory.states = std::move(traj.states);
        }
        curves.emplace_back("bloch_" + label, std::move(len));
      }
      r.trajectory.times = grid;
      r.trajectory.add_observable("bloch_length", mean);
      for (auto& [name, values] : curves) r.trajectory.add_observable(name, std::move(values));
      r.final_fidelity = std::clamp(overlap, 0.0, 1.0);
      r.timing = {0.0, 0.0, p.duration};
      r.set_metric("final_bloch_length", mean.back());
      r.set_metric("bx_G", b.bx);
      r.set_metric("bz_G", b.bz);
      if (mode == DephasingMode::common) r.set_metric("singlet_dark_residual", singlet_dark_residual(p.reg));
      out.push_back(std::move(r));
    }
  }
  return out;
}

ProtocolResult run_preparation(const PreparationParams& p) {
  require_two_carbons(p.reg, "preparation");
  const double gc = p.reg.constants.gamma_c;
  const auto schedule =
      FieldSchedule::Builder(0.0, p.start).ramp_bx(p.bx_target, p.bx_rate).ramp_bz(p.bz_target, p.bz_rate).build();
  const auto spec = DissipatorSpec::from_register(p.reg, p.dephasing);
  const double ramp_time = schedule.t_end() - schedule.t_start();
  const double total = ramp_time + p.pulses.window;

  ProtocolResult result;
  result.name = "preparation";
  result.parameters = echo(p);
  Recorder rec(tripartite_names());

  Operator rho = pure(StateVector::basis(4, nuclear_pair_index(Nuclear::up, Nuclear::up)));
  const auto channels = ms0_channels(spec, 2);
  double worst = 1.0;
  for (const auto& seg : schedule.segments()) {
    const double d = seg.t_end - seg.t_start;
    if (d <= 0.0) continue;
    const auto traj = ramp_stage(rho, seg, p.reg, channels, stage_points(d, total, p.solver.report_points),
                                 p.solver.integrator, result.stats);
    rec.append(0.0, traj, ramp_observer(schedule, p.reg, kPsi2));
    for (std::size_t k = 0; k < traj.size(); ++k) {
      const auto es = ms0_eigensystem(schedule.at(traj.times[k]), p.reg.d12, gc);
      worst = std::min(worst, fidelity(traj.states[k], es.states[0]));
    }
    rho = traj.states.back();
  }
  const MagneticField pulse_field = schedule.at(schedule.t_end());
  const auto es_end = ms0_eigensystem(pulse_field, p.reg.d12, gc);
  result.set_metric("min_adiabatic_overlap", worst);
  result.set_metric("psi1_overlap_after_ramps", fidelity(rho, es_end.states[0]));
  result.set_metric("initial_psi1_overlap",
                    fidelity(pure(StateVector::basis(4, nuclear_pair_index(Nuclear::up, Nuclear::up))),
                             ms0_eigensystem(p.start, p.reg.d12, gc).states[0]));
  if (worst < p.adiabatic_threshold) {
    std::ostringstream msg;
    msg << "adiabaticity: overlap with the instantaneous psi1 fell to " << worst << " during the ramps";
    result.flags.push_back(msg.str());
  }

  const auto levels = tripartite_levels(pulse_field, p.reg, p.ms1_model);
  const auto plan = make_stirap_plan(p.pulses.omega0, p.pulses.sigma, PulseOrdering::stirap, 0.0, p.pulses.window,
                                     p.pulses.boundary_ratio);
  const auto frame = make_frame(levels, 0, kPsi2, kPsi6);
  const RotatingHamiltonian h(levels, plan, frame, p.full_coupling);
  bool invariant = true;
  const auto traj = driven_stage(handoff(rho, levels), h, spec, 2,
                                 stage_points(p.pulses.window, total, p.solver.report_points), p.solver.integrator,
                                 result.stats, invariant);
  rec.append(ramp_time, traj, driven_observer(h.levels(), kPsi2));
  result.trajectory = rec.finish();

  const auto& tr = result.trajectory;
  result.final_fidelity = tr.observable("fidelity").back();
  result.peak_intermediate_population = peak(tr.observable("pop_psi6"));
  result.timing = {ramp_time, p.pulses.window, total};
  result.conservation = check_conservation(tr.states);

  const double chi61 = std::abs(levels.chi(kPsi6 - 4, 0));
  result.set_metric("ramp_bx_time_us", schedule.segments()[0].t_end - schedule.segments()[0].t_start);
  result.set_metric("ramp_bz_time_us", schedule.segments()[1].t_end - schedule.segments()[1].t_start);
  result.set_metric("peak_ms1_population", peak(tr.observable("pop_ms1")));
  result.set_metric("integrated_ms1_population_us", trapezoid(tr.times, tr.observable("pop_ms1")));
  result.set_metric("chi61", chi61);
  result.set_metric("chi62", std::abs(levels.chi(kPsi6 - 4, kPsi2)));
  result.set_metric("effective_pump_coupling_rad_per_us", chi61 * p.pulses.omega0 / 2.0);
  result.set_metric("dissipators_frame_invariant", invariant ? 1.0 : 0.0);
  return result;
}

ProtocolResult run_logic_flip(const LogicFlipParams& p) {
  const bool up = p.direction == FlipDirection::zero_to_one;
  return run_flip(p, {up ? kPsi2 : kPsi3, up ? kPsi3 : kPsi2, PulseOrdering::stirap,
                      "logic_flip_" + std::string(to_string(p.direction))});
}

Discrimination run_stirap_vs_bstirap(const LogicFlipParams& p) {
  // Both paths share one time grid: without an explicit start field neither is ramped.
  LogicFlipParams q = p;
  if (!q.bz_start) {
    q.bz_start = q.bz_target.value_or(singlet_degeneracy_bz(q.bx, q.reg.d12, q.reg.constants.gamma_c));
  }
  return {run_flip(q, {kPsi2, kPsi3, PulseOrdering::stirap, "stirap_path"}),
          run_flip(q, {kPsi3, kPsi2, PulseOrdering::b_stirap, "b_stirap_path"})};
}

ProtocolResult run_single_c13(const SingleC13Params& p) {
  p.reg.validate();
  if (p.reg.carbon_count() != 1) throw DimensionError("single-carbon transfer: requires one carbon");
  const auto eig = bipartite_eigensystem(p.field, p.reg);
  const auto levels = bipartite_levels(p.field, p.reg);
  const auto plan = make_stirap_plan(p.pulses.omega0, p.pulses.sigma, PulseOrdering::stirap, 0.0, p.pulses.window,
                                     p.pulses.boundary_ratio);
  const auto frame = make_frame(levels, 0, 1, 2);
  const RotatingHamiltonian h(levels, plan, frame, p.full_coupling);
  const auto spec = DissipatorSpec::from_register(p.reg, p.dephasing);

  ProtocolResult result;
  result.name = "single_c13";
  result.parameters = echo(p);
  bool invariant = true;
  const auto traj = driven_stage(eigen_projector(4, 0), h, spec, 1, p.solver.report_points, p.solver.integrator,
                                 result.stats, invariant);

  Recorder rec({"fidelity", "pop_phi1", "pop_phi2", "pop_phi3", "pop_phi4", "pop_ms1"});
  rec.append(0.0, traj, [](double, const Operator& rho) {
    return std::vector<double>{rho(1, 1).real(), rho(0, 0).real(), rho(1, 1).real(),
                               rho(2, 2).real(), rho(3, 3).real(), (rho(2, 2) + rho(3, 3)).real()};
  });
  result.trajectory = rec.finish();
  const auto& tr = result.trajectory;
  result.final_fidelity = tr.observable("fidelity").back();
  result.peak_intermediate_population = peak(tr.observable("pop_phi3"));
  result.timing = {0.0, p.pulses.window, p.pulses.window};
  result.conservation = check_conservation(tr.states);
  result.set_metric("mixing_theta_rad", eig.mixing_theta);
  result.set_metric("hyperfine_ratio", eig.hyperfine_ratio);
  result.set_metric("peak_phi4_population", peak(tr.observable("pop_phi4")));
  result.set_metric("peak_ms1_population", peak(tr.observable("pop_ms1")));
  result.set_metric("dissipators_frame_invariant", invariant ? 1.0 : 0.0);
  if (eig.weak_hyperfine) {
    std::ostringstream msg;
    msg << "weak hyperfine: A_zz / (gamma_c Bx) = " << eig.hyperfine_ratio << " is below 10";
    result.flags.push_back(msg.str());
  }
  return result;
}

ProtocolResult run_intuitive_baseline(const IntuitiveParams& p) {
  require_two_carbons(p.reg, "intuitive baseline");
  const auto levels = tripartite_levels(p.field, p.reg, p.ms1_model);
  const auto frame = make_frame(levels, 0, kPsi2, kPsi6);
  const auto spec = DissipatorSpec::from_register(p.reg, p.dephasing);
  const Operator rho0 = eigen_projector(levels.size(), 0);

  ProtocolResult result;
  result.name = "intuitive";
  result.parameters = echo(p);

  double center = p.pump_center;
  double delay = p.delay;
  if (p.scan) {
    if (!(p.scan_step > 0.0)) throw DomainError("intuitive scan: step must be positive");
    double best = -1.0;
    int evaluations = 0;
    const double eps = 1e-9 * p.scan_step;
    IntegratorOptions coarse = p.solver.integrator;
    coarse.rtol = p.scan_rtol;
    coarse.atol = p.scan_atol;
    for (double c = p.scan_center_min; c <= p.scan_center_max + eps; c += p.scan_step) {
      for (double d = p.scan_delay_min; d <= p.scan_delay_max + eps; d += p.scan_step) {
        if (c + d > p.window - p.scan_margin + eps) continue;
        const auto plan = make_intuitive_plan(p.omega0, p.sigma_p, p.sigma_s, 0.0, p.window, c, d);
        const RotatingHamiltonian h(levels, plan, frame, p.full_coupling);
        bool invariant = true;
        IntegrationStats scratch;
        const auto traj =
            driven_stage(rho0, h, spec, 2, p.scan_report_points, coarse, scratch, invariant);
        const double f = traj.states.back()(kPsi2, kPsi2).real();
        ++evaluations;
        if (f > best) {
          best = f;
          center = c;
          delay = d;
        }
      }
    }
    if (evaluations == 0) throw DomainError("intuitive scan: empty search grid");
    result.set_metric("scan_evaluations", evaluations);
  }

  const auto plan = make_intuitive_plan(p.omega0, p.sigma_p, p.sigma_s, 0.0, p.window, center, delay);
  const RotatingHamiltonian h(levels, plan, frame, p.full_coupling);
  bool invariant = true;
  const auto traj =
      driven_stage(rho0, h, spec, 2, p.solver.report_points, p.solver.integrator, result.stats, invariant);
  Recorder rec(tripartite_names());
  rec.append(0.0, traj, driven_observer(h.levels(), kPsi2));
  result.trajectory = rec.finish();
  const auto& tr = result.trajectory;
  result.final_fidelity = tr.observable("fidelity").back();
  result.peak_intermediate_population = peak(tr.observable("pop_psi6"));
  result.timing = {0.0, p.window, p.window};
  result.conservation = check_conservation(tr.states);
  result.parameters["pump_center_us"] = center;
  result.parameters["delay_us"] = delay;
  result.set_metric("pump_center_us", center);
  result.set_metric("delay_us", delay);
  result.set_metric("chi61", std::abs(levels.chi(kPsi6 - 4, 0)));
  result.set_metric("peak_ms1_population", peak(tr.observable("pop_ms1")));
  result.set_metric("dissipators_frame_invariant", invariant ? 1.0 : 0.0);
  return result;
}

double singlet_dark_residual(const RegisterConfig& reg) {
  require_two_carbons(reg, "singlet dark residual");
  const auto spec = DissipatorSpec::from_register(reg, DephasingMode::common);
  const auto channels = ms0_channels(spec, 2);
  return max_abs(dissipator(pure(singlet_state()), channels));
}

}  // namespace nvdfs
