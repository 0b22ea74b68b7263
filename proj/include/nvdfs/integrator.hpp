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
#include <vector>

#include "nvdfs/spin_algebra.hpp"

namespace nvdfs {

struct IntegratorOptions {
  double rtol = 1e-8;
  double atol = 1e-10;
  double max_step = 0.1;       // us
  double min_step = 1e-9;      // us; smaller accepted steps abort the run
  double initial_step = 1e-3;  // us
  long max_steps = 20'000'000;
};

struct IntegrationStats {
  long accepted = 0;
  long rejected = 0;
  long rhs_evaluations = 0;
  double smallest_step = 0.0;
  double largest_step = 0.0;
};

/// dy/dt = f(t, y), written into the third argument.
using DerivativeFn = std::function<void(double, const Operator&, Operator&)>;

/// Dormand-Prince 5(4) with FSAL and per-entry max-norm error control.
/// Steps are clipped so that every report time is hit exactly; the first
/// report time is the initial time and returns y0.
std::vector<Operator> integrate_dopri5(const DerivativeFn& f, const Operator& y0,
                                       std::span<const double> report_times, const IntegratorOptions& options,
                                       IntegrationStats* stats = nullptr);

/// `points` equally spaced times covering [t0, t1] inclusive.
std::vector<double> uniform_grid(double t0, double t1, int points);

}  // namespace nvdfs
