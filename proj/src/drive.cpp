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

#include "nvdfs/drive.hpp"

#include <cmath>
#include <numbers>
#include <sstream>
#include <string>

#include "nvdfs/error.hpp"

namespace nvdfs {

namespace {

constexpr int kExcitedBare[4] = {nuclear_pair_index(Nuclear::down, Nuclear::down),
                                 nuclear_pair_index(Nuclear::down, Nuclear::up),
                                 nuclear_pair_index(Nuclear::up, Nuclear::down),
                                 nuclear_pair_index(Nuclear::up, Nuclear::up)};

// Bare {+1, 0} x nuclear embedding of a nuclear-space vector.
ComplexVector embed_level(const ComplexVector& nuclear, NvLevel level) {
  const auto n = nuclear.size();
  ComplexVector out = ComplexVector::Zero(2 * n);
  out.segment(level == NvLevel::plus ? 0 : n, n) = nuclear;
  return out;
}

DrivenLevels assemble(Eigen::VectorXd energies, int n_ground, int nuclear_dim, const std::vector<StateVector>& ground,
                      const std::vector<StateVector>& excited) {
  DrivenLevels out;
  out.energies = std::move(energies);
  out.n_ground = n_ground;
  out.nuclear_dim = nuclear_dim;
  const int n = out.size();
  out.frame_basis = Operator::Zero(2 * nuclear_dim, n);
  for (int k = 0; k < n_ground; ++k) out.frame_basis.col(k) = ground[k].amplitudes();
  for (int k = 0; k < n - n_ground; ++k) out.frame_basis.col(n_ground + k) = excited[k].amplitudes();
  out.chi = chi_coefficients(excited, ground, nv_coupling_operator(nuclear_dim));
  return out;
}

}  // namespace

double GaussianPulse::envelope(double t) const {
  const double u = (t - center) / sigma;
  return omega0 * std::exp(-0.5 * u * u);
}

void GaussianPulse::validate() const {
  if (!(sigma > 0.0) || !std::isfinite(sigma)) throw DomainError("pulse sigma must be positive");
  if (!(omega0 >= 0.0) || !std::isfinite(omega0)) throw DomainError("pulse amplitude must be nonnegative");
  if (!std::isfinite(center)) throw DomainError("pulse center must be finite");
}

PulseOrdering parse_ordering(std::string_view tag) {
  if (tag == "stirap") return PulseOrdering::stirap;
  if (tag == "b_stirap") return PulseOrdering::b_stirap;
  if (tag == "intuitive") return PulseOrdering::intuitive;
  throw DomainError("unknown pulse ordering '" + std::string(tag) + "'");
}

std::string_view to_string(PulseOrdering o) {
  switch (o) {
    case PulseOrdering::stirap: return "stirap";
    case PulseOrdering::b_stirap: return "b_stirap";
    case PulseOrdering::intuitive: return "intuitive";
  }
  return "?";
}

double PulsePlan::amplitude(PulseRole role, double t) const {
  double sum = 0.0;
  for (const auto& p : pulses) {
    if (p.role == role) sum += p.envelope(t);
  }
  return sum;
}

const GaussianPulse& PulsePlan::pulse(PulseRole role) const {
  for (const auto& p : pulses) {
    if (p.role == role) return p;
  }
  throw DomainError(role == PulseRole::pump ? "plan has no pump pulse" : "plan has no Stokes pulse");
}

void PulsePlan::validate() const {
  if (!(t_end > t_start)) throw DomainError("pulse plan window must have positive length");
  for (const auto& p : pulses) p.validate();
  pulse(PulseRole::pump);
  pulse(PulseRole::stokes);
}

double minimum_stirap_span(double sigma, double boundary_ratio) {
  if (!(sigma > 0.0)) throw DomainError("sigma must be positive");
  if (!(boundary_ratio > 0.0 && boundary_ratio < 1.0)) throw DomainError("boundary ratio must lie in (0, 1)");
  // Ratio of the two envelopes at distance S/2 from the midpoint: exp(-S t_d / (2 sigma^2)).
  const double td = std::numbers::sqrt2 * sigma;
  return 2.0 * sigma * sigma * std::log(1.0 / boundary_ratio) / td;
}

PulsePlan make_stirap_plan(double omega0, double sigma, PulseOrdering order, double t_start, double t_end,
                           double boundary_ratio) {
  if (order == PulseOrdering::intuitive) throw DomainError("make_stirap_plan: use make_intuitive_plan");
  const double span = t_end - t_start;
  const double needed = minimum_stirap_span(sigma, boundary_ratio);
  if (!(span >= needed * (1.0 - 1e-12))) {
    std::ostringstream msg;
    msg << "pulse window of " << span << " us is shorter than the required minimum span of " << needed << " us";
    throw DomainError(msg.str());
  }
  const double mid = 0.5 * (t_start + t_end);
  const double td = std::numbers::sqrt2 * sigma;
  const double first = mid - 0.5 * td;
  const double second = mid + 0.5 * td;
  PulsePlan plan;
  plan.t_start = t_start;
  plan.t_end = t_end;
  plan.ordering = order;
  const bool stokes_first = order == PulseOrdering::stirap;
  plan.pulses = {{omega0, stokes_first ? second : first, sigma, 0.0, PulseRole::pump},
                 {omega0, stokes_first ? first : second, sigma, 0.0, PulseRole::stokes}};
  plan.validate();
  return plan;
}

PulsePlan make_intuitive_plan(double omega0, double sigma_p, double sigma_s, double t_start, double t_end,
                              double pump_center, double delay) {
  if (!(delay >= 0.0)) throw DomainError("intuitive plan: delay must be nonnegative");
  const double stokes_center = pump_center + delay;
  if (pump_center < t_start || stokes_center > t_end) {
    std::ostringstream msg;
    msg << "intuitive plan: pulse centres [" << pump_center << ", " << stokes_center << "] us fall outside the window ["
        << t_start << ", " << t_end << "] us";
    throw DomainError(msg.str());
  }
  PulsePlan plan;
  plan.t_start = t_start;
  plan.t_end = t_end;
  plan.ordering = PulseOrdering::intuitive;
  plan.pulses = {{omega0, pump_center, sigma_p, 0.0, PulseRole::pump},
                 {omega0, stokes_center, sigma_s, 0.0, PulseRole::stokes}};
  plan.validate();
  return plan;
}

Ms1Model parse_ms1_model(std::string_view tag) {
  if (tag == "simple") return Ms1Model::simple;
  if (tag == "full") return Ms1Model::full;
  throw DomainError("unknown m_s=+1 model '" + std::string(tag) + "'");
}

std::string_view to_string(Ms1Model m) { return m == Ms1Model::simple ? "simple" : "full"; }

Operator nv_coupling_operator(int nuclear_dim) {
  Operator nv = Operator::Zero(2, 2);
  nv(0, 1) = 1.0;
  nv(1, 0) = 1.0;
  return kron(nv, identity(nuclear_dim));
}

Operator chi_coefficients(std::span<const StateVector> excited, std::span<const StateVector> ground,
                          const Operator& v) {
  if (!is_hermitian(v)) throw DomainError("chi_coefficients: coupling operator must be Hermitian");
  Operator chi(static_cast<Eigen::Index>(excited.size()), static_cast<Eigen::Index>(ground.size()));
  for (std::size_t m = 0; m < excited.size(); ++m) {
    if (excited[m].dim() != v.rows()) throw DimensionError("chi_coefficients: excited state dimension mismatch");
    for (std::size_t n = 0; n < ground.size(); ++n) {
      if (ground[n].dim() != v.rows()) throw DimensionError("chi_coefficients: ground state dimension mismatch");
      chi(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(n)) =
          excited[m].amplitudes().dot(v * ground[n].amplitudes());
    }
  }
  return chi;
}

DrivenLevels tripartite_levels(MagneticField b, const RegisterConfig& cfg, Ms1Model model) {
  if (cfg.carbon_count() != 2) throw DimensionError("tripartite_levels: expected two carbons");
  const auto ms0 = ms0_eigensystem(b, cfg.d12, cfg.constants.gamma_c);

  Eigen::VectorXd energies(8);
  std::vector<StateVector> ground, excited;
  for (int k = 0; k < 4; ++k) {
    energies(k) = ms0.energies[k];
    ground.push_back(StateVector::preserve_phase(embed_level(ms0.states[k].amplitudes(), NvLevel::zero)));
  }

  std::vector<StateVector> bare;
  for (int idx : kExcitedBare) bare.push_back(StateVector::basis(4, idx));
  if (model == Ms1Model::simple) {
    const Operator h1 = h_ms1_simple(b, cfg);
    for (int k = 0; k < 4; ++k) {
      energies(4 + k) = h1(kExcitedBare[k], kExcitedBare[k]).real();
      excited.push_back(StateVector::preserve_phase(embed_level(bare[k].amplitudes(), NvLevel::plus)));
    }
  } else {
    const auto num = numerical_eig(h_ms1_full(b, cfg));
    const auto lab = label_states(num, bare);
    for (int k = 0; k < 4; ++k) {
      energies(4 + k) = num.energies(lab.index[k]);
      excited.push_back(
          StateVector::preserve_phase(embed_level(lab.representatives[k].amplitudes(), NvLevel::plus)));
    }
  }
  return assemble(std::move(energies), 4, 4, ground, excited);
}

DrivenLevels bipartite_levels(MagneticField b, const RegisterConfig& cfg) {
  const auto eig = bipartite_eigensystem(b, cfg);
  Eigen::VectorXd energies(4);
  std::vector<StateVector> ground, excited;
  for (int k = 0; k < 4; ++k) {
    energies(k) = eig.energies[k];
    const ComplexVector v = eig.states[k].amplitudes().head(4);
    (k < 2 ? ground : excited).push_back(StateVector::preserve_phase(v));
  }
  return assemble(std::move(energies), 2, 2, ground, excited);
}

RotatingFrameSpec make_frame(const DrivenLevels& levels, int initial, int target, int intermediate,
                             double pump_detuning, double stokes_detuning) {
  const int ng = levels.n_ground;
  if (initial < 0 || initial >= ng || target < 0 || target >= ng || initial == target) {
    throw DomainError("rotating frame: initial and target must be distinct ground levels");
  }
  if (intermediate < ng || intermediate >= levels.size()) {
    throw DomainError("rotating frame: intermediate must be an excited level");
  }
  const auto& e = levels.energies;
  RotatingFrameSpec f;
  f.initial = initial;
  f.target = target;
  f.intermediate = intermediate;
  f.pump_detuning = pump_detuning;
  f.stokes_detuning = stokes_detuning;
  f.omega_p = e(intermediate) - e(initial) - pump_detuning;
  f.omega_s = e(intermediate) - e(target) - stokes_detuning;
  f.delta = pump_detuning - stokes_detuning;
  f.frame_frequencies = Eigen::VectorXd::Zero(levels.size());
  f.frame_frequencies(initial) = e(initial);
  f.frame_frequencies(target) = e(initial) + f.omega_p - f.omega_s;
  for (int m = ng; m < levels.size(); ++m) f.frame_frequencies(m) = e(initial) + f.omega_p;
  f.detunings = e - f.frame_frequencies;
  return f;
}

void validate_frame(const DrivenLevels& levels, const RotatingFrameSpec& frame) {
  if (frame.detunings.size() != levels.size() || frame.frame_frequencies.size() != levels.size()) {
    throw DimensionError("rotating frame: size does not match the level set");
  }
  const RotatingFrameSpec ref = make_frame(levels, frame.initial, frame.target, frame.intermediate,
                                           levels.energies(frame.intermediate) -
                                               levels.energies(frame.initial) - frame.omega_p,
                                           levels.energies(frame.intermediate) -
                                               levels.energies(frame.target) - frame.omega_s);
  const double tol = 1e-9 * std::max(1.0, levels.energies.cwiseAbs().maxCoeff());
  const bool ok = std::abs(ref.pump_detuning - frame.pump_detuning) <= tol &&
                  std::abs(ref.stokes_detuning - frame.stokes_detuning) <= tol &&
                  std::abs(ref.delta - frame.delta) <= tol &&
                  (ref.detunings - frame.detunings).cwiseAbs().maxCoeff() <= tol &&
                  (ref.frame_frequencies - frame.frame_frequencies).cwiseAbs().maxCoeff() <= tol;
  if (!ok) throw DomainError("rotating frame: detunings are inconsistent with the carrier frequencies");
}

RotatingHamiltonian::RotatingHamiltonian(DrivenLevels levels, PulsePlan plan, RotatingFrameSpec frame,
                                         bool full_coupling)
    : levels_(std::move(levels)), plan_(std::move(plan)), frame_(std::move(frame)), full_coupling_(full_coupling) {
  plan_.validate();
  validate_frame(levels_, frame_);
  for (auto& p : plan_.pulses) p.carrier = p.role == PulseRole::pump ? frame_.omega_p : frame_.omega_s;
  const int n = levels_.size();
  const int ng = levels_.n_ground;
  diagonal_ = Operator::Zero(n, n);
  diagonal_.diagonal() = frame_.detunings.cast<Complex>();
  pump_ = Operator::Zero(n, n);
  stokes_ = Operator::Zero(n, n);
  for (int m = 0; m < levels_.n_excited(); ++m) {
    pump_(ng + m, frame_.initial) = 0.5 * levels_.chi(m, frame_.initial);
    stokes_(ng + m, frame_.target) = 0.5 * levels_.chi(m, frame_.target);
  }
  pump_ += pump_.adjoint().eval();
  stokes_ += stokes_.adjoint().eval();
}

Operator RotatingHamiltonian::operator()(double t) const {
  const double op = plan_.amplitude(PulseRole::pump, t);
  const double os = plan_.amplitude(PulseRole::stokes, t);
  Operator h = diagonal_ + op * pump_ + os * stokes_;
  if (!full_coupling_) return h;
  const int ng = levels_.n_ground;
  const auto& f = frame_.frame_frequencies;
  for (int m = 0; m < levels_.n_excited(); ++m) {
    for (int n = 0; n < ng; ++n) {
      Complex term = 0.0;
      if (n != frame_.initial) {
        term += 0.5 * op * std::polar(1.0, (f(ng + m) - f(n) - frame_.omega_p) * t);
      }
      if (n != frame_.target) {
        term += 0.5 * os * std::polar(1.0, (f(ng + m) - f(n) - frame_.omega_s) * t);
      }
      const Complex el = term * levels_.chi(m, n);
      h(ng + m, n) += el;
      h(n, ng + m) += std::conj(el);
    }
  }
  return h;
}

LabFrameHamiltonian::LabFrameHamiltonian(DrivenLevels levels, PulsePlan plan, RotatingFrameSpec frame)
    : levels_(std::move(levels)), plan_(std::move(plan)), frame_(std::move(frame)) {
  plan_.validate();
  validate_frame(levels_, frame_);
  const int n = levels_.size();
  const int ng = levels_.n_ground;
  coupling_ = Operator::Zero(n, n);
  coupling_.block(ng, 0, levels_.n_excited(), ng) = levels_.chi;
  coupling_ += coupling_.adjoint().eval();
}

Operator LabFrameHamiltonian::operator()(double t) const {
  const double drive = plan_.amplitude(PulseRole::pump, t) * std::cos(frame_.omega_p * t) +
                       plan_.amplitude(PulseRole::stokes, t) * std::cos(frame_.omega_s * t);
  Operator h = drive * coupling_;
  h.diagonal() += levels_.energies.cast<Complex>();
  return h;
}

Operator LabFrameHamiltonian::frame_unitary(double t) const {
  const int n = levels_.size();
  Operator u = Operator::Zero(n, n);
  for (int k = 0; k < n; ++k) u(k, k) = std::polar(1.0, -frame_.frame_frequencies(k) * t);
  return u;
}

}  // namespace nvdfs
