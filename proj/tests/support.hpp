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

#include <cmath>
#include <random>
#include <vector>

#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>

#include "nvdfs/lindblad.hpp"
#include "nvdfs/spin_algebra.hpp"

namespace nvdfs::testing {

inline Operator random_hermitian(int n, std::mt19937_64& rng, double scale = 1.0) {
  std::normal_distribution<double> g(0.0, scale);
  Operator a(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) a(i, j) = Complex(g(rng), g(rng));
  }
  return 0.5 * (a + a.adjoint());
}

inline Operator random_density(int n, std::mt19937_64& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  Operator a(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) a(i, j) = Complex(g(rng), g(rng));
  }
  Operator rho = a * a.adjoint();
  return rho / rho.trace().real();
}

inline ComplexVector random_state(int n, std::mt19937_64& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  ComplexVector v(n);
  for (int i = 0; i < n; ++i) v(i) = Complex(g(rng), g(rng));
  return v.normalized();
}

// Column-stacking: vec(A X B) = (B^T kron A) vec(X).
inline Operator vectorized_liouvillian(const Operator& h, const std::vector<Channel>& channels) {
  const auto n = h.rows();
  const Operator id = Operator::Identity(n, n);
  auto k = [](const Operator& a, const Operator& b) {
    Operator out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
      for (Eigen::Index j = 0; j < a.cols(); ++j) out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
    return out;
  };
  Operator l = Complex(0.0, -1.0) * (k(id, h) - k(h.transpose(), id));
  for (const auto& c : channels) {
    const Operator l2 = c.op * c.op;
    l += c.rate * (2.0 * k(c.op.transpose(), c.op) - k(id, l2) - k(l2.transpose(), id));
  }
  return l;
}

inline Operator vec(const Operator& rho) {
  const auto n = rho.rows();
  Operator v(n * n, 1);
  for (Eigen::Index j = 0; j < n; ++j) v.block(j * n, 0, n, 1) = rho.col(j);
  return v;
}

inline Operator unvec(const Operator& v, Eigen::Index n) {
  Operator rho(n, n);
  for (Eigen::Index j = 0; j < n; ++j) rho.col(j) = v.block(j * n, 0, n, 1);
  return rho;
}

inline Operator propagate_exact(const Operator& rho, const Operator& liouvillian, double t) {
  const Operator step = (liouvillian * Complex(t, 0.0)).exp();
  return unvec(step * vec(rho), rho.rows());
}

inline double max_norm(const Operator& a) { return a.cwiseAbs().maxCoeff(); }

}  // namespace nvdfs::testing
