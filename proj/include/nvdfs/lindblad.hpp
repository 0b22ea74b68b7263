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

#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "nvdfs/integrator.hpp"
#include "nvdfs/spin_algebra.hpp"
#include "nvdfs/system_model.hpp"

namespace nvdfs {

enum class DephasingMode { independent, common, none };

DephasingMode parse_dephasing_mode(std::string_view tag);
std::string_view to_string(DephasingMode m);

/// Pure-dephasing model. Independent mode gives each carbon its own channel
/// I_z^(i) with rate 1/T2n_i; common mode uses the collective I_z^(1) + I_z^(2)
/// with rate 1/t2n_star.front(). The electron channel S_z has rate 1/T2e in
/// both modes. `none` switches everything off.
struct DissipatorSpec {
  DephasingMode mode = DephasingMode::independent;
  double t2e_star = 7.0;
  std::vector<double> t2n_star{500.0, 700.0};

  static DissipatorSpec from_register(const RegisterConfig& cfg, DephasingMode mode);
  void validate() const;
};

/// Contributes rate * (2 L rho L - L^2 rho - rho L^2) for Hermitian L.
struct Channel {
  double rate = 0.0;
  Operator op;
  std::string name;
};

/// `sz` may be an empty matrix when the electron is frozen in m_s = 0.
std::vector<Channel> dephasing_channels(const DissipatorSpec& spec, const Operator& sz, std::span<const Operator> iz);

/// B^dagger L B for every channel.
std::vector<Channel> channels_in_basis(std::span<const Channel> channels, const Operator& basis);

Operator dissipator(const Operator& rho, std::span<const Channel> channels);
Operator lindblad_rhs(const Operator& rho, const Operator& h, std::span<const Channel> channels);

/// True when L has no elements between levels of different frame frequency,
/// i.e. it commutes with the frame generator.
bool commutes_with_frame(const Operator& op, const Eigen::VectorXd& frame_frequencies, double tolerance = 1e-12);

/// Time-dependent master equation. With frame frequencies f, channel
/// elements pick up e^{i(f_a - f_b) t} so that fixed eigenbasis jump
/// operators are expressed in the rotating frame.
class MasterEquation {
 public:
  using HamiltonianFn = std::function<Operator(double)>;

  MasterEquation(HamiltonianFn h, std::vector<Channel> channels, Eigen::VectorXd frame_frequencies = {});

  void operator()(double t, const Operator& rho, Operator& out) const;

  Operator hamiltonian(double t) const { return h_(t); }
  const std::vector<Channel>& channels() const { return channels_; }
  std::vector<Channel> channels_at(double t) const;
  /// Whether every channel commutes with the frame (phases are then trivial).
  bool frame_invariant() const { return frame_invariant_; }

 private:
  HamiltonianFn h_;
  std::vector<Channel> channels_;
  Eigen::VectorXd frame_;
  bool frame_invariant_ = true;
};

struct Trajectory {
  std::vector<double> times;
  std::vector<Operator> states;
  std::vector<std::string> observable_names;
  std::vector<std::vector<double>> observable_values;

  void add_observable(std::string name, std::vector<double> values);
  bool has_observable(std::string_view name) const;
  const std::vector<double>& observable(std::string_view name) const;
  std::size_t size() const { return times.size(); }
};

/// Integrates the master equation from rho0 over `report_times`.
Trajectory integrate(const Operator& rho0, const MasterEquation& equation, std::span<const double> report_times,
                     const IntegratorOptions& options, IntegrationStats* stats = nullptr);

/// Rejects rho that is not Hermitian, unit-trace and positive semidefinite.
void validate_density_matrix(const Operator& rho, double tolerance = 1e-8);

double fidelity(const Operator& rho, const StateVector& target);

/// Length of (<X>, <Y>, <Z>) for Pauli operators on span{basis0, basis1}.
double bloch_length(const Operator& rho, const StateVector& basis0, const StateVector& basis1);

std::vector<double> populations(const Operator& rho, std::span<const StateVector> states);

double mean_energy(const Operator& rho, const Operator& h);

struct ConservationReport {
  double max_trace_error = 0.0;
  double max_hermiticity_residual = 0.0;
  double min_eigenvalue = 1.0;

  bool ok(double trace_tol = 1e-8, double hermiticity_tol = 1e-10, double positivity_tol = 1e-8) const;
  void merge(const ConservationReport& other);
};

ConservationReport check_conservation(std::span<const Operator> states);

}  // namespace nvdfs
