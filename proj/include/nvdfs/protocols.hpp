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

#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <json.hpp>

#include "nvdfs/drive.hpp"
#include "nvdfs/integrator.hpp"
#include "nvdfs/lindblad.hpp"
#include "nvdfs/system_model.hpp"
#include "nvdfs/units.hpp"

namespace nvdfs {

using Json = nlohmann::ordered_json;

struct SolverSettings {
  IntegratorOptions integrator;
  int report_points = 500;  // per protocol, split across stages by duration
};

struct StirapSettings {
  double omega0 = units::mhz(0.5);
  double sigma = 5.0;
  double window = 30.0;
  double boundary_ratio = 0.1;
};

struct DfsParams {
  RegisterConfig reg = RegisterConfig::two_carbon();
  double bx = 100.0;
  std::optional<double> bz;  // unset: singlet degeneracy point for bx
  double duration = 100.0;
  /// "average" over the six cardinal states, or one of
  /// zero, one, plus, minus, plus_i, minus_i.
  std::string preparation = "average";
  std::vector<DephasingMode> variants{DephasingMode::independent, DephasingMode::common};
  SolverSettings solver;
};

struct PreparationParams {
  RegisterConfig reg = RegisterConfig::two_carbon();
  MagneticField start{5.0, 70.0};
  double bx_target = 100.0;
  double bx_rate = 7.0;  // G/us
  double bz_target = 5.0;
  double bz_rate = -10.0;
  StirapSettings pulses{units::mhz(0.5), 5.0, 30.0};
  DephasingMode dephasing = DephasingMode::independent;
  Ms1Model ms1_model = Ms1Model::simple;
  bool full_coupling = false;
  double adiabatic_threshold = 0.9;
  SolverSettings solver;
};

enum class FlipDirection { zero_to_one, one_to_zero };

FlipDirection parse_direction(std::string_view tag);
std::string_view to_string(FlipDirection d);

struct LogicFlipParams {
  RegisterConfig reg = RegisterConfig::two_carbon();
  double bx = 100.0;
  /// Unset: psi_2 starts at 5 G (where preparation leaves it) and is ramped
  /// to the pulse field; psi_3 starts at the pulse field.
  std::optional<double> bz_start;
  std::optional<double> bz_target;  // unset: singlet degeneracy point
  double bz_rate = 10.0;
  FlipDirection direction = FlipDirection::zero_to_one;
  StirapSettings pulses{units::mhz(1.0), 5.0, 30.0};
  DephasingMode dephasing = DephasingMode::independent;
  Ms1Model ms1_model = Ms1Model::simple;
  bool full_coupling = false;
  double adiabatic_threshold = 0.9;
  SolverSettings solver;
};

struct SingleC13Params {
  RegisterConfig reg = RegisterConfig::single_carbon();
  MagneticField field{100.0, 10.0};
  StirapSettings pulses{units::mhz(0.5), 9.0, 30.0};
  DephasingMode dephasing = DephasingMode::independent;
  bool full_coupling = false;
  SolverSettings solver;
};

struct IntuitiveParams {
  RegisterConfig reg = RegisterConfig::two_carbon();
  MagneticField field{100.0, 70.0};
  double omega0 = units::mhz(0.1);
  double sigma_p = 5.5;
  double sigma_s = 2.8;
  double window = 30.0;
  double pump_center = 8.0;
  double delay = 16.0;
  /// Coarse grid search over pump centre and delay before the reported run.
  bool scan = true;
  double scan_center_min = 6.0;
  double scan_center_max = 16.0;
  double scan_delay_min = 4.0;
  double scan_delay_max = 20.0;
  double scan_step = 2.0;
  double scan_margin = 2.0;  // Stokes centre at most window - margin
  int scan_report_points = 31;
  double scan_rtol = 1e-6;
  double scan_atol = 1e-8;
  DephasingMode dephasing = DephasingMode::independent;
  Ms1Model ms1_model = Ms1Model::simple;
  bool full_coupling = false;
  SolverSettings solver;
};

struct ProtocolTiming {
  double ramp_time = 0.0;
  double pulse_time = 0.0;
  double total_time = 0.0;
};

struct ProtocolResult {
  std::string name;
  Trajectory trajectory;
  double final_fidelity = 0.0;
  double peak_intermediate_population = 0.0;
  ProtocolTiming timing;
  Json parameters;
  std::vector<std::pair<std::string, double>> metrics;
  std::vector<std::string> flags;
  ConservationReport conservation;
  IntegrationStats stats;

  void set_metric(std::string name, double value);
  double metric(std::string_view name) const;
  bool has_metric(std::string_view name) const;
};

Json echo(const DfsParams& p);
Json echo(const PreparationParams& p);
Json echo(const LogicFlipParams& p);
Json echo(const SingleC13Params& p);
Json echo(const IntuitiveParams& p);

/// Four curves {dfs, bare} x {independent, common} (or fewer if `variants`
/// is restricted), ordered variant-major.
std::vector<ProtocolResult> run_dfs_comparison(const DfsParams& p);

ProtocolResult run_preparation(const PreparationParams& p);

ProtocolResult run_logic_flip(const LogicFlipParams& p);

struct Discrimination {
  ProtocolResult stirap;
  ProtocolResult b_stirap;
};

/// Same physical pulse sequence (the pulse on the psi_3 transition first)
/// applied to psi_2 (STIRAP path) and to psi_3 (b-STIRAP path).
Discrimination run_stirap_vs_bstirap(const LogicFlipParams& p);

ProtocolResult run_single_c13(const SingleC13Params& p);

ProtocolResult run_intuitive_baseline(const IntuitiveParams& p);

/// max |L_I(|psi_2><psi_2|)| for the common nuclear channel.
double singlet_dark_residual(const RegisterConfig& reg);

}  // namespace nvdfs
