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

#include <span>
#include <string_view>
#include <vector>

#include "nvdfs/eigensolve.hpp"
#include "nvdfs/spin_algebra.hpp"
#include "nvdfs/system_model.hpp"

namespace nvdfs {

enum class PulseRole { pump, stokes };

struct GaussianPulse {
  double omega0 = 0.0;  // peak Rabi frequency, rad/us
  double center = 0.0;  // us
  double sigma = 1.0;   // us
  double carrier = 0.0; // rad/us, filled in from the frame when known
  PulseRole role = PulseRole::pump;

  double envelope(double t) const;
  void validate() const;
};

enum class PulseOrdering { stirap, b_stirap, intuitive };

PulseOrdering parse_ordering(std::string_view tag);
std::string_view to_string(PulseOrdering o);

struct PulsePlan {
  std::vector<GaussianPulse> pulses;
  double t_start = 0.0;
  double t_end = 0.0;
  PulseOrdering ordering = PulseOrdering::stirap;

  /// Summed envelope of all pulses with the given role.
  double amplitude(PulseRole role, double t) const;
  const GaussianPulse& pulse(PulseRole role) const;
  double duration() const { return t_end - t_start; }
  void validate() const;
};

/// Smallest window for which, at each boundary, the later pulse is at most
/// `boundary_ratio` times the earlier one (delay t_d = sqrt(2) sigma).
double minimum_stirap_span(double sigma, double boundary_ratio);

/// Two equal Gaussians centred at the window midpoint +- t_d/2 with
/// t_d = sqrt(2) sigma. stirap puts the Stokes pulse first.
PulsePlan make_stirap_plan(double omega0, double sigma, PulseOrdering order, double t_start, double t_end,
                           double boundary_ratio = 0.1);

/// Pump-first sequential plan with independent widths.
PulsePlan make_intuitive_plan(double omega0, double sigma_p, double sigma_s, double t_start, double t_end,
                              double pump_center, double delay);

/// Ground (m_s = 0) and excited (m_s = +1) eigenstates of a driven register.
///
/// Levels are numbered ground first. `frame_basis` holds the eigenstates as
/// columns in the bare {m_s = +1, m_s = 0} x nuclear basis, so that an
/// operator X in that basis reads frame_basis^dagger X frame_basis.
struct DrivenLevels {
  Eigen::VectorXd energies;
  int n_ground = 0;
  int nuclear_dim = 0;
  Operator chi;          // n_excited x n_ground, chi(m, n) = <e_m|V|g_n>
  Operator frame_basis;  // columns: eigenstates in the bare basis

  int size() const { return static_cast<int>(energies.size()); }
  int n_excited() const { return size() - n_ground; }
};

enum class Ms1Model { simple, full };

Ms1Model parse_ms1_model(std::string_view tag);
std::string_view to_string(Ms1Model m);

/// V = |+1><0| + |0><+1| on the NV factor of the {+1, 0} x nuclear space.
Operator nv_coupling_operator(int nuclear_dim);

/// chi(m, n) = <excited_m|V|ground_n>. V must be Hermitian.
Operator chi_coefficients(std::span<const StateVector> excited, std::span<const StateVector> ground,
                          const Operator& v);

/// Two carbons: psi_1..psi_4 from the closed-form m_s = 0 eigensystem and
/// psi_5..psi_8 = |1 dd>, |1 du>, |1 ud>, |1 uu> (simple model) or the
/// eigenstates of the full m_s = +1 Hamiltonian labelled onto them.
DrivenLevels tripartite_levels(MagneticField b, const RegisterConfig& cfg, Ms1Model model = Ms1Model::simple);

/// One carbon: phi_1, phi_2 (m_s = 0) and phi_3 = |+1 up>, phi_4 = |+1 down>.
DrivenLevels bipartite_levels(MagneticField b, const RegisterConfig& cfg);

/// Lambda-system rotating frame.
///
/// Frame frequencies: initial -> E_ini, excited -> E_ini + w_p,
/// target -> E_ini + w_p - w_s, other ground levels -> 0. `detunings` is the
/// resulting diagonal E - f. Pump and Stokes detunings are taken against the
/// intermediate level: D_p = E_int - E_ini - w_p, D_s = E_int - E_tgt - w_s,
/// and delta = D_p - D_s.
struct RotatingFrameSpec {
  int initial = 0;
  int target = 1;
  int intermediate = 0;
  double omega_p = 0.0;
  double omega_s = 0.0;
  double pump_detuning = 0.0;
  double stokes_detuning = 0.0;
  double delta = 0.0;
  Eigen::VectorXd frame_frequencies;
  Eigen::VectorXd detunings;
};

RotatingFrameSpec make_frame(const DrivenLevels& levels, int initial, int target, int intermediate,
                             double pump_detuning = 0.0, double stokes_detuning = 0.0);

/// Rejects a frame whose stored detunings disagree with its carriers.
void validate_frame(const DrivenLevels& levels, const RotatingFrameSpec& frame);

/// Time-dependent drive Hamiltonian in the rotating frame.
///
/// Default: the pump couples only the initial level and the Stokes only the
/// target level, each to every excited level. With `full_coupling` every
/// ground-excited pair is driven by both fields with its residual phase
/// e^{i(f_m - f_n - w)t}.
class RotatingHamiltonian {
 public:
  RotatingHamiltonian(DrivenLevels levels, PulsePlan plan, RotatingFrameSpec frame, bool full_coupling = false);

  Operator operator()(double t) const;

  const DrivenLevels& levels() const { return levels_; }
  const PulsePlan& plan() const { return plan_; }
  const RotatingFrameSpec& frame() const { return frame_; }
  bool full_coupling() const { return full_coupling_; }

 private:
  DrivenLevels levels_;
  PulsePlan plan_;
  RotatingFrameSpec frame_;
  bool full_coupling_;
  Operator diagonal_;
  Operator pump_;
  Operator stokes_;
};

/// Laboratory-frame eigenbasis Hamiltonian diag(E) + sum_f Omega_f(t) cos(w_f t) (chi + chi^dagger)
/// with all couplings and no rotating-wave approximation.
class LabFrameHamiltonian {
 public:
  LabFrameHamiltonian(DrivenLevels levels, PulsePlan plan, RotatingFrameSpec frame);

  Operator operator()(double t) const;

  /// exp(-i F t) for the frame of `frame`; maps rotating-frame states to the lab.
  Operator frame_unitary(double t) const;

 private:
  DrivenLevels levels_;
  PulsePlan plan_;
  RotatingFrameSpec frame_;
  Operator coupling_;
};

}  // namespace nvdfs
