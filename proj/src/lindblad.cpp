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

#include "nvdfs/lindblad.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "nvdfs/error.hpp"

namespace nvdfs {

DephasingMode parse_dephasing_mode(std::string_view tag) {
  if (tag == "independent") return DephasingMode::independent;
  if (tag == "common") return DephasingMode::common;
  if (tag == "none") return DephasingMode::none;
  throw DomainError("unknown dephasing mode '" + std::string(tag) + "'");
}

std::string_view to_string(DephasingMode m) {
  switch (m) {
    case DephasingMode::independent: return "independent";
    case DephasingMode::common: return "common";
    case DephasingMode::none: return "none";
  }
  return "?";
}

DissipatorSpec DissipatorSpec::from_register(const RegisterConfig& cfg, DephasingMode mode) {
  DissipatorSpec spec;
  spec.mode = mode;
  spec.t2e_star = cfg.t2e_star;
  spec.t2n_star.clear();
  for (const auto& c : cfg.carbons) spec.t2n_star.push_back(c.t2n_star);
  return spec;
}

void DissipatorSpec::validate() const {
  if (mode == DephasingMode::none) return;
  if (!(t2e_star > 0.0) || !std::isfinite(t2e_star)) throw DomainError("T2e_star must be positive");
  if (t2n_star.empty()) throw DomainError("T2n_star must list at least one time");
  for (double t : t2n_star) {
    if (!(t > 0.0) || !std::isfinite(t)) throw DomainError("T2n_star must be positive");
  }
}

std::vector<Channel> dephasing_channels(const DissipatorSpec& spec, const Operator& sz, std::span<const Operator> iz) {
  spec.validate();
  std::vector<Channel> out;
  if (spec.mode == DephasingMode::none) return out;
  if (sz.size() > 0) out.push_back({1.0 / spec.t2e_star, sz, "Sz"});
  if (iz.empty()) return out;
  if (spec.mode == DephasingMode::independent) {
    if (spec.t2n_star.size() < iz.size()) throw DimensionError("independent dephasing needs one T2n_star per carbon");
    for (std::size_t c = 0; c < iz.size(); ++c) {
      out.push_back({1.0 / spec.t2n_star[c], iz[c], "Iz" + std::to_string(c + 1)});
    }
  } else {
    Operator sum = iz[0];
    for (std::size_t c = 1; c < iz.size(); ++c) sum += iz[c];
    out.push_back({1.0 / spec.t2n_star.front(), sum, "Iz_common"});
  }
  return out;
}

std::vector<Channel> channels_in_basis(std::span<const Channel> channels, const Operator& basis) {
  std::vector<Channel> out;
  out.reserve(channels.size());
  for (const auto& c : channels) {
    if (c.op.rows() != basis.rows()) throw DimensionError("channels_in_basis: dimension mismatch");
    out.push_back({c.rate, basis.adjoint() * c.op * basis, c.name});
  }
  return out;
}

Operator dissipator(const Operator& rho, std::span<const Channel> channels) {
  Operator out = Operator::Zero(rho.rows(), rho.cols());
  for (const auto& c : channels) {
    if (c.op.rows() != rho.rows() || c.op.cols() != rho.cols()) {
      throw DimensionError("dissipator: channel operator dimension mismatch");
    }
    const Operator l_rho = c.op * rho;
    const Operator rho_l = rho * c.op;
    out += c.rate * (2.0 * l_rho * c.op - c.op * l_rho - rho_l * c.op);
  }
  return out;
}

Operator lindblad_rhs(const Operator& rho, const Operator& h, std::span<const Channel> channels) {
  if (rho.rows() != rho.cols() || h.rows() != rho.rows() || h.cols() != rho.cols()) {
    throw DimensionError("lindblad_rhs: dimension mismatch");
  }
  const Complex minus_i(0.0, -1.0);
  Operator out = minus_i * (h * rho - rho * h);
  out += dissipator(rho, channels);
  return out;
}

bool commutes_with_frame(const Operator& op, const Eigen::VectorXd& f, double tolerance) {
  if (f.size() == 0) return true;
  for (Eigen::Index a = 0; a < op.rows(); ++a) {
    for (Eigen::Index b = 0; b < op.cols(); ++b) {
      if (std::abs(op(a, b)) > tolerance && std::abs(f(a) - f(b)) > 0.0) return false;
    }
  }
  return true;
}

MasterEquation::MasterEquation(HamiltonianFn h, std::vector<Channel> channels, Eigen::VectorXd frame_frequencies)
    : h_(std::move(h)), channels_(std::move(channels)), frame_(std::move(frame_frequencies)) {
  for (const auto& c : channels_) {
    if (!is_hermitian(c.op, 1e-12)) throw DomainError("master equation: channel '" + c.name + "' is not Hermitian");
    if (frame_.size() > 0 && frame_.size() != c.op.rows()) {
      throw DimensionError("master equation: frame size does not match channel '" + c.name + "'");
    }
    frame_invariant_ = frame_invariant_ && commutes_with_frame(c.op, frame_);
  }
}

std::vector<Channel> MasterEquation::channels_at(double t) const {
  if (frame_invariant_) return channels_;
  // L_ab e^{i(f_a - f_b)t} = (D L D^dagger)_ab with D = diag(e^{i f t}).
  const Eigen::VectorXcd d = (Complex(0.0, 1.0) * t * frame_.cast<Complex>()).array().exp().matrix();
  std::vector<Channel> out = channels_;
  for (auto& c : out) c.op = d.asDiagonal() * c.op * d.conjugate().asDiagonal();
  return out;
}

void MasterEquation::operator()(double t, const Operator& rho, Operator& out) const {
  if (frame_invariant_) {
    out = lindblad_rhs(rho, h_(t), channels_);
  } else {
    const auto ch = channels_at(t);
    out = lindblad_rhs(rho, h_(t), ch);
  }
}

void Trajectory::add_observable(std::string name, std::vector<double> values) {
  if (values.size() != times.size()) throw DimensionError("observable '" + name + "' does not match the time grid");
  for (std::size_t k = 0; k < observable_names.size(); ++k) {
    if (observable_names[k] == name) {
      observable_values[k] = std::move(values);
      return;
    }
  }
  observable_names.push_back(std::move(name));
  observable_values.push_back(std::move(values));
}

bool Trajectory::has_observable(std::string_view name) const {
  return std::find(observable_names.begin(), observable_names.end(), name) != observable_names.end();
}

const std::vector<double>& Trajectory::observable(std::string_view name) const {
  for (std::size_t k = 0; k < observable_names.size(); ++k) {
    if (observable_names[k] == name) return observable_values[k];
  }
  throw DomainError("trajectory has no observable '" + std::string(name) + "'");
}

void validate_density_matrix(const Operator& rho, double tolerance) {
  if (rho.rows() != rho.cols() || rho.rows() == 0) throw DimensionError("density matrix must be square");
  if (max_abs(rho - rho.adjoint()) > tolerance) throw DomainError("density matrix is not Hermitian");
  if (std::abs(rho.trace() - Complex(1.0, 0.0)) > tolerance) throw DomainError("density matrix trace is not 1");
  if (hermitian_eigenvalues(rho).minCoeff() < -tolerance) throw DomainError("density matrix is not positive");
}

Trajectory integrate(const Operator& rho0, const MasterEquation& equation, std::span<const double> report_times,
                     const IntegratorOptions& options, IntegrationStats* stats) {
  validate_density_matrix(rho0);
  Trajectory out;
  out.times.assign(report_times.begin(), report_times.end());
  out.states = integrate_dopri5([&equation](double t, const Operator& y, Operator& dy) { equation(t, y, dy); },
                                rho0, report_times, options, stats);
  return out;
}

double fidelity(const Operator& rho, const StateVector& target) {
  if (rho.rows() != target.dim()) throw DimensionError("fidelity: dimension mismatch");
  const double f = target.amplitudes().dot(rho * target.amplitudes()).real();
  if (f < -1e-12 || f > 1.0 + 1e-12) {
    std::ostringstream msg;
    msg << "fidelity: value " << f << " outside [0, 1]";
    throw NumericalError(msg.str());
  }
  return std::clamp(f, 0.0, 1.0);
}

double bloch_length(const Operator& rho, const StateVector& basis0, const StateVector& basis1) {
  if (basis0.dim() != rho.rows() || basis1.dim() != rho.rows()) throw DimensionError("bloch_length: dimension mismatch");
  if (std::abs(basis0.inner(basis1)) > 1e-10) throw DomainError("bloch_length: basis states are not orthogonal");
  const auto& a = basis0.amplitudes();
  const auto& b = basis1.amplitudes();
  const Complex r00 = a.dot(rho * a);
  const Complex r11 = b.dot(rho * b);
  const Complex r01 = a.dot(rho * b);
  const double x = 2.0 * r01.real();
  const double y = -2.0 * r01.imag();
  const double z = (r00 - r11).real();
  return std::sqrt(x * x + y * y + z * z);
}

std::vector<double> populations(const Operator& rho, std::span<const StateVector> states) {
  std::vector<double> out;
  out.reserve(states.size());
  for (const auto& s : states) {
    if (s.dim() != rho.rows()) throw DimensionError("populations: dimension mismatch");
    out.push_back(s.amplitudes().dot(rho * s.amplitudes()).real());
  }
  return out;
}

double mean_energy(const Operator& rho, const Operator& h) {
  if (rho.rows() != h.rows() || rho.cols() != h.cols()) throw DimensionError("mean_energy: dimension mismatch");
  const Complex e = (rho * h).trace();
  const double scale = std::max(1.0, max_abs(h));
  if (std::abs(e.imag()) > 1e-10 * scale) throw NumericalError("mean_energy: expectation has an imaginary part");
  return e.real();
}

bool ConservationReport::ok(double trace_tol, double hermiticity_tol, double positivity_tol) const {
  return max_trace_error <= trace_tol && max_hermiticity_residual <= hermiticity_tol &&
         min_eigenvalue >= -positivity_tol;
}

void ConservationReport::merge(const ConservationReport& other) {
  max_trace_error = std::max(max_trace_error, other.max_trace_error);
  max_hermiticity_residual = std::max(max_hermiticity_residual, other.max_hermiticity_residual);
  min_eigenvalue = std::min(min_eigenvalue, other.min_eigenvalue);
}

ConservationReport check_conservation(std::span<const Operator> states) {
  ConservationReport r;
  for (const auto& rho : states) {
    r.max_trace_error = std::max(r.max_trace_error, std::abs(rho.trace() - Complex(1.0, 0.0)));
    r.max_hermiticity_residual = std::max(r.max_hermiticity_residual, max_abs(rho - rho.adjoint()));
    const Operator sym = 0.5 * (rho + rho.adjoint());
    r.min_eigenvalue = std::min(r.min_eigenvalue, hermitian_eigenvalues(sym).minCoeff());
  }
  return r;
}

}  // namespace nvdfs
