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

#include "nvdfs/eigensolve.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <string>

#include <Eigen/Eigenvalues>

#include "nvdfs/error.hpp"

namespace nvdfs {

namespace {

constexpr double kCubicClampTolerance = 1e-12;
constexpr double kSingularRatio = 1e-6;
constexpr double kTieTolerance = 1e-6;

constexpr int kUU = nuclear_pair_index(Nuclear::up, Nuclear::up);
constexpr int kUD = nuclear_pair_index(Nuclear::up, Nuclear::down);
constexpr int kDU = nuclear_pair_index(Nuclear::down, Nuclear::up);
constexpr int kDD = nuclear_pair_index(Nuclear::down, Nuclear::down);

// Real triplet-sector vector in the order {dd, uu, T0}.
using Triplet = Eigen::Vector3d;

Triplet coefficients_to_triplet(double alpha, double beta, double xi) {
  return {(alpha + beta) / std::numbers::sqrt2, (alpha - beta) / std::numbers::sqrt2, xi};
}

// Gauge: xi >= 0; for xi = 0 the largest component is made positive.
void fix_triplet_sign(Triplet& v) {
  if (std::abs(v(2)) > 1e-12) {
    if (v(2) < 0.0) v = -v;
    return;
  }
  Eigen::Index k = 0;
  for (Eigen::Index i = 1; i < 3; ++i) {
    if (std::abs(v(i)) > std::abs(v(k)) + 1e-12) k = i;
  }
  if (v(k) < 0.0) v = -v;
}

ComplexVector triplet_to_pair(const Triplet& v) {
  ComplexVector out = ComplexVector::Zero(4);
  out(kDD) = v(0);
  out(kUU) = v(1);
  out(kUD) = v(2) / std::numbers::sqrt2;
  out(kDU) = v(2) / std::numbers::sqrt2;
  return out;
}

Eigen::Matrix3d triplet_block(MagneticField b, double d12, double gamma_c) {
  RegisterConfig cfg = RegisterConfig::two_carbon();
  cfg.d12 = d12;
  cfg.constants.gamma_c = gamma_c;
  const Operator h = h_ms0(b, cfg);
  Eigen::Matrix<Complex, 4, 3> t = Eigen::Matrix<Complex, 4, 3>::Zero();
  t(kDD, 0) = 1.0;
  t(kUU, 1) = 1.0;
  t(kUD, 2) = 1.0 / std::numbers::sqrt2;
  t(kDU, 2) = 1.0 / std::numbers::sqrt2;
  return (t.adjoint() * h * t).real();
}

// Unit null vectors of (M - E). One for a simple eigenvalue, two for a
// doubly degenerate one.
std::vector<Triplet> triplet_null_space(const Eigen::Matrix3d& m, double e) {
  const Eigen::Matrix3d a = m - e * Eigen::Matrix3d::Identity();
  const double scale = std::max(a.cwiseAbs().maxCoeff(), 1e-300);
  Triplet best = Triplet::Zero();
  for (int i = 0; i < 3; ++i) {
    for (int j = i + 1; j < 3; ++j) {
      const Triplet c = a.row(i).transpose().cross(a.row(j).transpose());
      if (c.norm() > best.norm()) best = c;
    }
  }
  if (best.norm() > 1e-8 * scale * scale) return {best.normalized()};

  Eigen::Index r = 0;
  a.rowwise().norm().maxCoeff(&r);
  const Triplet row = a.row(r).transpose();
  Eigen::Index axis = 0;
  row.cwiseAbs().minCoeff(&axis);
  const Triplet u = row.cross(Triplet::Unit(axis)).normalized();
  const Triplet w = row.cross(u).normalized();
  return {u, w};
}

}  // namespace

StateVector singlet_state() {
  ComplexVector v = ComplexVector::Zero(4);
  v(kDU) = 1.0 / std::numbers::sqrt2;
  v(kUD) = -1.0 / std::numbers::sqrt2;
  return StateVector::preserve_phase(v);
}

double singlet_degeneracy_bz(double bx, double d12, double gamma_c) {
  if (!(bx >= 0.0)) throw DomainError("singlet_degeneracy_bz: Bx must be nonnegative");
  if (!(gamma_c > 0.0)) throw DomainError("singlet_degeneracy_bz: gamma_c must be positive");
  return std::sqrt(d12 * d12 + 2.0 * gamma_c * gamma_c * bx * bx) / (2.0 * gamma_c);
}

Ms0Eigensystem ms0_eigensystem(MagneticField b, double d12, double gamma_c) {
  if (!std::isfinite(b.bx) || !std::isfinite(b.bz) || !std::isfinite(d12) || !(gamma_c > 0.0)) {
    throw DomainError("ms0_eigensystem: non-finite input");
  }
  const double g2 = gamma_c * gamma_c;
  const double bx2 = b.bx * b.bx;
  const double bz2 = b.bz * b.bz;

  Ms0Eigensystem out;
  out.q = (3.0 * d12 * d12 + 4.0 * g2 * (bx2 + bz2)) / 12.0;
  out.r = (d12 * d12 * d12 + 2.0 * d12 * g2 * (bx2 - 2.0 * bz2)) / 8.0;
  if (!(out.q > 0.0)) throw DomainError("ms0_eigensystem: Q <= 0 (zero field and zero coupling)");

  double c = out.r / std::pow(out.q, 1.5);
  if (std::abs(c) > 1.0 + kCubicClampTolerance) {
    throw DomainError("ms0_eigensystem: cubic argument outside [-1, 1]");
  }
  c = std::clamp(c, -1.0, 1.0);
  out.theta_cubic = std::acos(c);
  const double sq = 2.0 * std::sqrt(out.q);
  const double pi = std::numbers::pi;
  out.energies = {sq * std::cos(out.theta_cubic / 3.0), 0.0, sq * std::cos((out.theta_cubic + 4.0 * pi) / 3.0),
                  sq * std::cos((out.theta_cubic + 2.0 * pi) / 3.0)};

  out.states.assign(4, singlet_state());
  out.closed_form = {true, true, true, true};

  const double scale2 = d12 * d12 + 4.0 * g2 * (bx2 + bz2);
  std::optional<Eigen::Matrix3d> block;
  std::vector<std::pair<double, int>> degenerate_used;  // energy, null vectors consumed

  for (int k : {0, 2, 3}) {
    const double e = out.energies[k];
    const double x = d12 + 2.0 * e;
    const double d_i = x * x * x * x + 4.0 * g2 * (bx2 - 2.0 * bz2) * x * x + 16.0 * bz2 * g2 * g2 * (bx2 + bz2);
    out.norm_d[k] = d_i;

    Triplet v;
    if (d_i > 0.0 && std::sqrt(d_i) > kSingularRatio * scale2) {
      const double root = std::sqrt(d_i);
      v = coefficients_to_triplet(-2.0 * b.bx * gamma_c * x / root, 4.0 * b.bx * b.bz * g2 / root,
                                  (4.0 * g2 * bz2 - x * x) / root);
    } else {
      out.closed_form[k] = false;
      if (!block) block = triplet_block(b, d12, gamma_c);
      const auto null = triplet_null_space(*block, e);
      int used = 0;
      for (auto& [energy, count] : degenerate_used) {
        if (std::abs(energy - e) <= 1e-9 * std::sqrt(scale2)) used = count++;
      }
      if (null.size() > 1 && used == 0) degenerate_used.emplace_back(e, 1);
      v = null[std::min<std::size_t>(static_cast<std::size_t>(used), null.size() - 1)];
    }
    fix_triplet_sign(v);
    v.normalize();
    out.alpha[k] = (v(0) + v(1)) / std::numbers::sqrt2;
    out.beta[k] = (v(0) - v(1)) / std::numbers::sqrt2;
    out.xi[k] = v(2);
    out.states[k] = StateVector::preserve_phase(triplet_to_pair(v));
  }
  return out;
}

BipartiteEigensystem bipartite_eigensystem(MagneticField b, const RegisterConfig& cfg) {
  if (cfg.carbon_count() != 1) throw DimensionError("bipartite_eigensystem: expected one carbon");
  const auto& k = cfg.constants;
  const double a_zz = cfg.carbons[0].a_zz;
  const double gc = k.gamma_c;
  const double field = std::hypot(b.bx, b.bz);

  BipartiteEigensystem out;
  if (b.bx == 0.0 && field + b.bz == 0.0) {
    out.mixing_theta = b.bz < 0.0 ? std::numbers::pi / 2.0 : 0.0;
  } else {
    out.mixing_theta = std::atan2(b.bx, field + b.bz);
  }
  const double th = out.mixing_theta;

  const double plus_z = a_zz + gc * b.bz;
  const double minus_z = gc * b.bz - a_zz;
  const double s_plus = std::hypot(gc * b.bx, plus_z);
  const double s_minus = std::hypot(gc * b.bx, minus_z);
  const double sgn_plus = plus_z >= 0.0 ? 1.0 : -1.0;
  const double sgn_minus = minus_z >= 0.0 ? 1.0 : -1.0;
  const double e_plus = k.zero_field_splitting + k.gamma_e * b.bz;
  const double e_minus = k.zero_field_splitting - k.gamma_e * b.bz;

  out.energies = {0.5 * gc * field,
                  -0.5 * gc * field,
                  e_plus + 0.5 * sgn_plus * s_plus,
                  e_plus - 0.5 * sgn_plus * s_plus,
                  e_minus + 0.5 * sgn_minus * s_minus,
                  e_minus - 0.5 * sgn_minus * s_minus};

  auto index = [](NvLevel level, Nuclear n) { return 2 * static_cast<int>(level) + static_cast<int>(n); };
  ComplexVector phi1 = ComplexVector::Zero(6);
  phi1(index(NvLevel::zero, Nuclear::up)) = std::cos(th);
  phi1(index(NvLevel::zero, Nuclear::down)) = std::sin(th);
  ComplexVector phi2 = ComplexVector::Zero(6);
  phi2(index(NvLevel::zero, Nuclear::up)) = std::sin(th);
  phi2(index(NvLevel::zero, Nuclear::down)) = -std::cos(th);

  out.states = {StateVector::preserve_phase(phi1),
                StateVector::preserve_phase(phi2),
                StateVector::basis(6, index(NvLevel::plus, Nuclear::up)),
                StateVector::basis(6, index(NvLevel::plus, Nuclear::down)),
                StateVector::basis(6, index(NvLevel::minus, Nuclear::up)),
                StateVector::basis(6, index(NvLevel::minus, Nuclear::down))};

  const double transverse = gc * std::abs(b.bx);
  out.hyperfine_ratio = transverse > 0.0 ? std::abs(a_zz) / transverse : std::numeric_limits<double>::infinity();
  out.weak_hyperfine = out.hyperfine_ratio < 10.0;
  return out;
}

NumericalEigensystem numerical_eig(const Operator& h) {
  if (h.rows() != h.cols() || h.rows() == 0) throw DimensionError("numerical_eig: matrix must be square");
  if (!is_hermitian(h, 1e-10)) throw DomainError("numerical_eig: matrix is not Hermitian");
  const Operator sym = 0.5 * (h + h.adjoint());
  Eigen::SelfAdjointEigenSolver<Operator> solver(sym);
  if (solver.info() != Eigen::Success) throw NumericalError("numerical_eig: eigensolver did not converge");
  NumericalEigensystem out;
  out.energies = solver.eigenvalues();
  out.states.reserve(static_cast<std::size_t>(h.rows()));
  for (Eigen::Index j = 0; j < h.cols(); ++j) out.states.emplace_back(solver.eigenvectors().col(j));
  return out;
}

StateLabeling label_states(const NumericalEigensystem& numerical, std::span<const StateVector> reference,
                           double min_overlap, double degeneracy_tolerance) {
  const int n = static_cast<int>(numerical.states.size());
  const int m = static_cast<int>(reference.size());
  if (m > n) throw DimensionError("label_states: more reference states than eigenvectors");
  for (const auto& r : reference) {
    if (r.dim() != n) throw DimensionError("label_states: reference dimension mismatch");
  }

  // Degenerate clusters of consecutive (ascending) eigenvalues.
  const double escale = std::max(1.0, numerical.energies.cwiseAbs().maxCoeff());
  std::vector<std::vector<int>> clusters;
  for (int j = 0; j < n; ++j) {
    if (j > 0 && numerical.energies(j) - numerical.energies(j - 1) <= degeneracy_tolerance * escale) {
      clusters.back().push_back(j);
    } else {
      clusters.push_back({j});
    }
  }

  struct Candidate {
    int label;
    int cluster;
    double weight;
  };
  std::vector<Candidate> candidates;
  for (int k = 0; k < m; ++k) {
    for (int c = 0; c < static_cast<int>(clusters.size()); ++c) {
      double w = 0.0;
      for (int j : clusters[c]) w += std::norm(numerical.states[j].inner(reference[k]));
      candidates.push_back({k, c, w});
    }
  }
  std::stable_sort(candidates.begin(), candidates.end(), [](const Candidate& a, const Candidate& b) {
    if (std::abs(a.weight - b.weight) > kTieTolerance) return a.weight > b.weight;
    if (a.label != b.label) return a.label < b.label;
    return a.cluster < b.cluster;
  });

  std::vector<int> assigned_cluster(m, -1);
  std::vector<double> weight(m, 0.0);
  std::vector<int> capacity(clusters.size());
  for (std::size_t c = 0; c < clusters.size(); ++c) capacity[c] = static_cast<int>(clusters[c].size());
  StateLabeling out;

  for (std::size_t i = 0; i < candidates.size(); ++i) {
    const auto& cand = candidates[i];
    if (assigned_cluster[cand.label] >= 0 || capacity[cand.cluster] == 0) continue;
    for (std::size_t j = i + 1; j < candidates.size(); ++j) {
      const auto& other = candidates[j];
      if (std::abs(other.weight - cand.weight) > kTieTolerance) break;
      const bool same_label = other.label == cand.label && capacity[other.cluster] > 0;
      const bool same_slot =
          other.cluster == cand.cluster && capacity[cand.cluster] == 1 && assigned_cluster[other.label] < 0;
      if (same_label || same_slot) {
        out.tie_broken.push_back(cand.label);
        break;
      }
    }
    assigned_cluster[cand.label] = cand.cluster;
    weight[cand.label] = cand.weight;
    --capacity[cand.cluster];
  }

  for (int k = 0; k < m; ++k) {
    if (assigned_cluster[k] < 0 || weight[k] < min_overlap) {
      throw DomainError("label_states: reference state " + std::to_string(k + 1) +
                        " has no eigenvector with overlap >= " + std::to_string(min_overlap) +
                        " (best " + std::to_string(weight[k]) + ")");
    }
  }

  out.index.assign(m, -1);
  out.overlap = weight;
  out.representatives.assign(m, StateVector::basis(n, 0));
  std::vector<int> slot_used(clusters.size(), 0);
  std::vector<std::vector<ComplexVector>> slot_vectors(clusters.size());
  for (int k = 0; k < m; ++k) {
    const int c = assigned_cluster[k];
    const auto& members = clusters[c];
    out.index[k] = members[slot_used[c]++];
    if (members.size() == 1) {
      out.representatives[k] = numerical.states[members[0]];
      continue;
    }
    ComplexVector p = ComplexVector::Zero(n);
    for (int j : members) p += numerical.states[j].inner(reference[k]) * numerical.states[j].amplitudes();
    for (const auto& q : slot_vectors[c]) p -= q.dot(p) * q;
    if (p.norm() < 1e-12) throw NumericalError("label_states: degenerate eigenspace exhausted");
    p.normalize();
    slot_vectors[c].push_back(p);
    out.representatives[k] = StateVector(p);
  }
  return out;
}

}  // namespace nvdfs
