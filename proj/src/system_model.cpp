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

#include "nvdfs/system_model.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "nvdfs/error.hpp"

namespace nvdfs {

namespace {

constexpr double kScheduleTolerance = 1e-9;

void require_positive(double value, const char* what) {
  if (!(value > 0.0) || !std::isfinite(value)) {
    throw DomainError(std::string(what) + " must be strictly positive");
  }
}

void require_carbons(const RegisterConfig& cfg, std::size_t n, const char* who) {
  if (cfg.carbon_count() != n) {
    throw DimensionError(std::string(who) + ": expected " + std::to_string(n) +
                         " carbon(s), got " + std::to_string(cfg.carbon_count()));
  }
}

// Nuclear operators on the two-carbon space {up,down} x {up,down}.
struct PairOperators {
  Operator ix1, iy1, iz1, ip1, im1;
  Operator ix2, iy2, iz2, ip2, im2;
};

PairOperators pair_operators() {
  const auto s = spin_half_operators();
  const std::vector<int> dims{2, 2};
  return {embed(s.ix, 0, dims), embed(s.iy, 0, dims), embed(s.iz, 0, dims),
          embed(s.iplus, 0, dims), embed(s.iminus, 0, dims),
          embed(s.ix, 1, dims), embed(s.iy, 1, dims), embed(s.iz, 1, dims),
          embed(s.iplus, 1, dims), embed(s.iminus, 1, dims)};
}

Operator dipolar_zz_form(double d12, const PairOperators& p) {
  return 0.5 * d12 * ((p.ip1 * p.im2 + p.im1 * p.ip2) - 4.0 * p.iz1 * p.iz2);
}

}  // namespace

void PhysicalConstants::validate() const {
  require_positive(zero_field_splitting, "zero_field_splitting");
  require_positive(gamma_e, "gamma_e");
  require_positive(gamma_c, "gamma_c");
  require_positive(mu0_prefactor, "mu0_prefactor");
}

CarbonParams CarbonParams::near_carbon() {
  return {units::mhz(12.45), units::mhz(1.16), 0.0, 500.0};
}

CarbonParams CarbonParams::far_carbon() {
  return {units::mhz(2.28), units::mhz(0.24), 0.0, 700.0};
}

CarbonParams CarbonParams::single_carbon() {
  return {units::mhz(1.07), 0.0, 0.0, 500.0};
}

void CarbonParams::validate() const {
  require_positive(t2n_star, "T2n_star");
  if (!(a_ani >= 0.0)) throw DomainError("A_ani must be nonnegative");
  if (!std::isfinite(a_zz) || !std::isfinite(phi)) throw DomainError("carbon parameters must be finite");
}

RegisterConfig RegisterConfig::two_carbon() {
  RegisterConfig cfg;
  cfg.carbons = {CarbonParams::near_carbon(), CarbonParams::far_carbon()};
  return cfg;
}

RegisterConfig RegisterConfig::single_carbon() {
  RegisterConfig cfg;
  cfg.carbons = {CarbonParams::single_carbon()};
  return cfg;
}

void RegisterConfig::validate() const {
  constants.validate();
  if (carbons.empty() || carbons.size() > 2) {
    throw DimensionError("register must hold one or two carbons");
  }
  for (const auto& c : carbons) c.validate();
  if (!(d12 >= 0.0)) throw DomainError("d12 must be nonnegative");
  require_positive(t2e_star, "T2e_star");
}

FieldSchedule::Builder& FieldSchedule::Builder::linear(double duration, MagneticField end) {
  if (!(duration >= 0.0)) throw DomainError("field schedule: negative segment duration");
  segments_.push_back({t_, t_ + duration, field_.bx, end.bx, field_.bz, end.bz});
  t_ += duration;
  field_ = end;
  return *this;
}

FieldSchedule::Builder& FieldSchedule::Builder::ramp_bx(double target, double rate) {
  if (rate == 0.0) throw DomainError("field schedule: zero ramp rate");
  const double duration = (target - field_.bx) / rate;
  if (duration < 0.0) throw DomainError("field schedule: ramp rate sign does not reach the target");
  return linear(duration, {target, field_.bz});
}

FieldSchedule::Builder& FieldSchedule::Builder::ramp_bz(double target, double rate) {
  if (rate == 0.0) throw DomainError("field schedule: zero ramp rate");
  const double duration = (target - field_.bz) / rate;
  if (duration < 0.0) throw DomainError("field schedule: ramp rate sign does not reach the target");
  return linear(duration, {field_.bx, target});
}

FieldSchedule::Builder& FieldSchedule::Builder::hold(double duration) { return linear(duration, field_); }

FieldSchedule FieldSchedule::Builder::build() const { return FieldSchedule(segments_); }

FieldSchedule::FieldSchedule(std::vector<FieldSegment> segments) : segments_(std::move(segments)) {
  if (segments_.empty()) throw DomainError("field schedule: no segments");
  for (std::size_t k = 0; k < segments_.size(); ++k) {
    const auto& s = segments_[k];
    if (!(s.t_end >= s.t_start)) throw DomainError("field schedule: segment ends before it starts");
    if (k == 0) continue;
    const auto& prev = segments_[k - 1];
    if (std::abs(s.t_start - prev.t_end) > kScheduleTolerance) {
      throw DomainError("field schedule: segments are not contiguous");
    }
    if (std::abs(s.bx_start - prev.bx_end) > kScheduleTolerance ||
        std::abs(s.bz_start - prev.bz_end) > kScheduleTolerance) {
      throw DomainError("field schedule: B(t) is discontinuous at a segment boundary");
    }
  }
}

MagneticField FieldSchedule::at(double t) const {
  if (segments_.empty()) throw DomainError("field schedule: empty");
  const FieldSegment* seg = &segments_.front();
  if (t >= segments_.back().t_start) {
    seg = &segments_.back();
  } else {
    for (const auto& s : segments_) {
      if (t < s.t_end) {
        seg = &s;
        break;
      }
    }
  }
  const double span = seg->t_end - seg->t_start;
  double u = span > 0.0 ? (t - seg->t_start) / span : 1.0;
  u = std::clamp(u, 0.0, 1.0);
  return {seg->bx_start + u * (seg->bx_end - seg->bx_start),
          seg->bz_start + u * (seg->bz_end - seg->bz_start)};
}

double FieldSchedule::t_start() const { return segments_.empty() ? 0.0 : segments_.front().t_start; }
double FieldSchedule::t_end() const { return segments_.empty() ? 0.0 : segments_.back().t_end; }

double dipolar_coupling(double r12_nm, const PhysicalConstants& constants) {
  if (!(r12_nm > 0.0) || !std::isfinite(r12_nm)) throw DomainError("dipolar_coupling: distance must be positive");
  return constants.mu0_prefactor * constants.gamma_c * constants.gamma_c / (r12_nm * r12_nm * r12_nm);
}

std::vector<int> site_dims(std::size_t n_carbons) {
  std::vector<int> dims{3};
  dims.insert(dims.end(), n_carbons, 2);
  return dims;
}

Operator h_full_tripartite(MagneticField b, const RegisterConfig& cfg) {
  require_carbons(cfg, 2, "h_full_tripartite");
  const auto& k = cfg.constants;
  const auto dims = site_dims(2);
  const auto s = spin1_operators();
  const auto n = spin_half_operators();
  const Operator sx = embed(s.sx, 0, dims);
  const Operator sz = embed(s.sz, 0, dims);

  Operator h = k.zero_field_splitting * sz * sz + k.gamma_e * (b.bz * sz + b.bx * sx);
  std::vector<Operator> ip, im, iz;
  for (std::size_t c = 0; c < 2; ++c) {
    const auto& carbon = cfg.carbons[c];
    const Operator ix_c = embed(n.ix, c + 1, dims);
    const Operator iy_c = embed(n.iy, c + 1, dims);
    const Operator iz_c = embed(n.iz, c + 1, dims);
    // Secular hyperfine: S_z (A_zz I_z + A_ani (cos phi I_x + sin phi I_y)).
    h += sz * (carbon.a_zz * iz_c + carbon.a_ani * (std::cos(carbon.phi) * ix_c + std::sin(carbon.phi) * iy_c));
    h += k.gamma_c * (b.bz * iz_c + b.bx * ix_c);
    ip.push_back(embed(n.iplus, c + 1, dims));
    im.push_back(embed(n.iminus, c + 1, dims));
    iz.push_back(iz_c);
  }
  // Dipolar coupling with r12 along z: d12 (I1.I2 - 3 I1z I2z).
  h += 0.5 * cfg.d12 * ((ip[0] * im[1] + im[0] * ip[1]) - 4.0 * iz[0] * iz[1]);
  return h;
}

Operator h_ms0(MagneticField b, const RegisterConfig& cfg) {
  require_carbons(cfg, 2, "h_ms0");
  const double gc = cfg.constants.gamma_c;
  const auto p = pair_operators();
  return gc * b.bz * (p.iz1 + p.iz2) + gc * b.bx * (p.ix1 + p.ix2) + dipolar_zz_form(cfg.d12, p);
}

Operator h_ms1_simple(MagneticField b, const RegisterConfig& cfg) {
  require_carbons(cfg, 2, "h_ms1_simple");
  const auto& k = cfg.constants;
  const auto p = pair_operators();
  return (k.zero_field_splitting + k.gamma_e * b.bz) * identity(4) + cfg.carbons[0].a_zz * p.iz1 +
         cfg.carbons[1].a_zz * p.iz2;
}

Operator h_ms1_full(MagneticField b, const RegisterConfig& cfg) {
  require_carbons(cfg, 2, "h_ms1_full");
  const auto& k = cfg.constants;
  const auto p = pair_operators();
  const double omega_e = k.zero_field_splitting + k.gamma_e * b.bz;
  const double omega_1z = k.gamma_c * b.bz + cfg.carbons[0].a_zz;
  const double omega_2z = k.gamma_c * b.bz + cfg.carbons[1].a_zz;
  const Complex omega_1x = 0.5 * (k.gamma_c * b.bx + cfg.carbons[0].a_ani * std::polar(1.0, -cfg.carbons[0].phi));
  const Complex omega_2x = 0.5 * (k.gamma_c * b.bx + cfg.carbons[1].a_ani * std::polar(1.0, -cfg.carbons[1].phi));
  return omega_e * identity(4) + omega_1z * p.iz1 + omega_2z * p.iz2 + omega_1x * p.ip1 +
         std::conj(omega_1x) * p.im1 + omega_2x * p.ip2 + std::conj(omega_2x) * p.im2;
}

Operator h_bipartite(MagneticField b, const RegisterConfig& cfg) {
  require_carbons(cfg, 1, "h_bipartite");
  const auto& k = cfg.constants;
  const auto dims = site_dims(1);
  const auto s = spin1_operators();
  const auto n = spin_half_operators();
  const Operator sz = embed(s.sz, 0, dims);
  const Operator iz = embed(n.iz, 1, dims);
  const Operator ipm = embed(n.iplus + n.iminus, 1, dims);
  return k.zero_field_splitting * sz * sz + k.gamma_e * b.bz * sz + k.gamma_c * b.bz * iz +
         0.5 * k.gamma_c * b.bx * ipm + cfg.carbons[0].a_zz * sz * iz;
}

Manifold parse_manifold(std::string_view tag) {
  if (tag == "ms0") return Manifold::ms0;
  if (tag == "ms_plus1") return Manifold::ms_plus1;
  if (tag == "both") return Manifold::both;
  throw DomainError("unknown manifold tag '" + std::string(tag) + "'");
}

std::string_view to_string(Manifold m) {
  switch (m) {
    case Manifold::ms0: return "ms0";
    case Manifold::ms_plus1: return "ms_plus1";
    case Manifold::both: return "both";
  }
  return "?";
}

std::vector<int> manifold_indices(Manifold m, int nuclear_dim) {
  std::vector<int> levels;
  switch (m) {
    case Manifold::ms0: levels = {static_cast<int>(NvLevel::zero)}; break;
    case Manifold::ms_plus1: levels = {static_cast<int>(NvLevel::plus)}; break;
    case Manifold::both: levels = {static_cast<int>(NvLevel::plus), static_cast<int>(NvLevel::zero)}; break;
  }
  std::vector<int> out;
  for (int level : levels) {
    for (int n = 0; n < nuclear_dim; ++n) out.push_back(level * nuclear_dim + n);
  }
  return out;
}

RestrictedOperator manifold_restrict(const Operator& h, Manifold m, int nuclear_dim) {
  if (nuclear_dim <= 0 || h.rows() != 3 * nuclear_dim || h.cols() != h.rows()) {
    throw DimensionError("manifold_restrict: operator is not on the full NV space");
  }
  auto idx = manifold_indices(m, nuclear_dim);
  return {principal_submatrix(h, idx), std::move(idx)};
}

}  // namespace nvdfs
