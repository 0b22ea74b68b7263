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

#include <array>
#include <span>
#include <vector>

#include "nvdfs/spin_algebra.hpp"
#include "nvdfs/system_model.hpp"

namespace nvdfs {

/// Closed-form eigensystem of the two-carbon m_s = 0 Hamiltonian.
///
/// Arrays are indexed by label - 1 (psi_1 .. psi_4). psi_2 is the singlet
/// with E_2 = 0 for every field; its alpha/beta/xi/norm entries are zero.
/// States live in the nuclear basis {uu, ud, du, dd}.
struct Ms0Eigensystem {
  std::array<double, 4> energies{};
  std::vector<StateVector> states;
  std::array<double, 4> alpha{};
  std::array<double, 4> beta{};
  std::array<double, 4> xi{};
  std::array<double, 4> norm_d{};
  /// false where the coefficient formulas are singular (d_i -> 0) and the
  /// state came from the null space of the triplet block instead.
  std::array<bool, 4> closed_form{};
  double q = 0.0;
  double r = 0.0;
  double theta_cubic = 0.0;
};

Ms0Eigensystem ms0_eigensystem(MagneticField b, double d12, double gamma_c);

/// (|du> - |ud>)/sqrt(2) on the two-carbon nuclear space.
StateVector singlet_state();

/// Bz that puts psi_3 at zero energy (cubic angle pi/2, R = 0).
double singlet_degeneracy_bz(double bx, double d12, double gamma_c);

/// Single-carbon eigensystem with the transverse nuclear Zeeman term dropped
/// in the m_s = +-1 eigenvectors. States are on the full 6-dim space.
struct BipartiteEigensystem {
  std::array<double, 6> energies{};
  std::vector<StateVector> states;
  double mixing_theta = 0.0;
  double hyperfine_ratio = 0.0;  // A_zz / (gamma_c Bx)
  bool weak_hyperfine = false;   // ratio below 10
};

BipartiteEigensystem bipartite_eigensystem(MagneticField b, const RegisterConfig& cfg);

struct NumericalEigensystem {
  Eigen::VectorXd energies;  // ascending
  std::vector<StateVector> states;
};

NumericalEigensystem numerical_eig(const Operator& h);

struct StateLabeling {
  std::vector<int> index;                     // reference label -> numerical column
  std::vector<double> overlap;                // weight of the reference in its assigned eigenspace
  std::vector<StateVector> representatives;   // numerical state standing in for each label
  std::vector<int> tie_broken;                // labels resolved by the lower-index rule
};

/// Greedy maximum-overlap assignment of numerical eigenvectors to reference
/// states. Degenerate numerical eigenvalues (within `degeneracy_tolerance`
/// relative) form one slot; references landing in it receive the projection
/// onto that eigenspace, orthonormalized in label order.
StateLabeling label_states(const NumericalEigensystem& numerical, std::span<const StateVector> reference,
                           double min_overlap = 0.9, double degeneracy_tolerance = 1e-9);

}  // namespace nvdfs
