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

#include <cstddef>
#include <string_view>
#include <vector>

#include "nvdfs/spin_algebra.hpp"
#include "nvdfs/units.hpp"

namespace nvdfs {

/// Static magnetic field in gauss, B = bz z + bx x.
struct MagneticField {
  double bx = 0.0;
  double bz = 0.0;

  friend bool operator==(const MagneticField&, const MagneticField&) = default;
};

/// mu0 * hbar / 4pi in units where gamma is in rad/(us G), distances in nm
/// and the resulting coupling in rad/us.
inline constexpr double kDipolarPrefactor = 1.054571817;

struct PhysicalConstants {
  double zero_field_splitting = units::mhz(2870.0);
  double gamma_e = units::mhz_per_gauss(2.8);
  double gamma_c = units::khz_per_gauss(1.07);
  double mu0_prefactor = kDipolarPrefactor;

  void validate() const;
  friend bool operator==(const PhysicalConstants&, const PhysicalConstants&) = default;
};

/// Hyperfine couplings (rad/us) and nuclear dephasing time (us) of one carbon.
struct CarbonParams {
  double a_zz = 0.0;
  double a_ani = 0.0;
  double phi = 0.0;
  double t2n_star = 500.0;

  static CarbonParams near_carbon();  // 13C_1 of the hyperfine table
  static CarbonParams far_carbon();   // 13C_2
  static CarbonParams single_carbon();

  void validate() const;
  friend bool operator==(const CarbonParams&, const CarbonParams&) = default;
};

struct RegisterConfig {
  PhysicalConstants constants;
  std::vector<CarbonParams> carbons;
  double d12 = units::khz(4.0);  // ignored for one carbon
  double t2e_star = 7.0;

  static RegisterConfig two_carbon();
  static RegisterConfig single_carbon();

  std::size_t carbon_count() const { return carbons.size(); }
  void validate() const;
  friend bool operator==(const RegisterConfig&, const RegisterConfig&) = default;
};

struct FieldSegment {
  double t_start = 0.0;
  double t_end = 0.0;
  double bx_start = 0.0;
  double bx_end = 0.0;
  double bz_start = 0.0;
  double bz_end = 0.0;
};

/// Piecewise-linear B(t). Segments are contiguous and B is continuous across
/// segment boundaries.
class FieldSchedule {
 public:
  class Builder {
   public:
    Builder(double t_start, MagneticField start) : t_(t_start), field_(start) {}

    Builder& ramp_bx(double target, double rate_gauss_per_us);
    Builder& ramp_bz(double target, double rate_gauss_per_us);
    Builder& hold(double duration);
    FieldSchedule build() const;

   private:
    Builder& linear(double duration, MagneticField end);

    double t_;
    MagneticField field_;
    std::vector<FieldSegment> segments_;
  };

  FieldSchedule() = default;
  explicit FieldSchedule(std::vector<FieldSegment> segments);

  MagneticField at(double t) const;
  double t_start() const;
  double t_end() const;
  const std::vector<FieldSegment>& segments() const { return segments_; }

 private:
  std::vector<FieldSegment> segments_;
};

double dipolar_coupling(double r12_nm, const PhysicalConstants& constants = {});

/// Site dimensions {3, 2, ...} for the NV plus `n_carbons` nuclei.
std::vector<int> site_dims(std::size_t n_carbons);

/// Full NV + two-carbon Hamiltonian (dim 12), secular hyperfine terms.
Operator h_full_tripartite(MagneticField b, const RegisterConfig& cfg);
/// m_s = 0 manifold, two carbons (dim 4).
Operator h_ms0(MagneticField b, const RegisterConfig& cfg);
/// m_s = +1 manifold with isotropic hyperfine only (diagonal, dim 4).
Operator h_ms1_simple(MagneticField b, const RegisterConfig& cfg);
/// m_s = +1 manifold including transverse field and anisotropic hyperfine.
Operator h_ms1_full(MagneticField b, const RegisterConfig& cfg);
/// NV + one carbon, full S = 1 space (dim 6).
Operator h_bipartite(MagneticField b, const RegisterConfig& cfg);

enum class Manifold { ms0, ms_plus1, both };

Manifold parse_manifold(std::string_view tag);
std::string_view to_string(Manifold m);

/// Indices of the retained NV levels within the full composite space, in
/// global basis order.
std::vector<int> manifold_indices(Manifold m, int nuclear_dim);

struct RestrictedOperator {
  Operator op;
  std::vector<int> indices;
};

RestrictedOperator manifold_restrict(const Operator& h, Manifold m, int nuclear_dim);

}  // namespace nvdfs
