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

#include "nvdfs/integrator.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <string>

#include "nvdfs/error.hpp"

namespace nvdfs {

namespace {

// Dormand-Prince 5(4) tableau.
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561, a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784, b6 = 11.0 / 84;
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200, e6 = 22.0 / 525,
                 e7 = -1.0 / 40;

constexpr double kSafety = 0.9;
constexpr double kMinFactor = 0.2;
constexpr double kMaxFactor = 5.0;

double error_norm(const Operator& err, const Operator& y0, const Operator& y1, double atol, double rtol) {
  double worst = 0.0;
  for (Eigen::Index j = 0; j < err.cols(); ++j) {
    for (Eigen::Index i = 0; i < err.rows(); ++i) {
      const double scale = atol + rtol * std::max(std::abs(y0(i, j)), std::abs(y1(i, j)));
      const double r = std::abs(err(i, j)) / scale;
      if (!(r <= worst)) worst = r;  // keeps NaN
    }
  }
  return worst;
}

}  // namespace

std::vector<double> uniform_grid(double t0, double t1, int points) {
  if (points < 2) throw DomainError("reporting grid needs at least two points");
  if (!(t1 > t0)) throw DomainError("reporting grid must have positive length");
  std::vector<double> out(static_cast<std::size_t>(points));
  for (int k = 0; k < points; ++k) out[k] = t0 + (t1 - t0) * k / (points - 1);
  out.back() = t1;
  return out;
}

std::vector<Operator> integrate_dopri5(const DerivativeFn& f, const Operator& y0,
                                       std::span<const double> report_times, const IntegratorOptions& opt,
                                       IntegrationStats* stats) {
  if (report_times.empty()) throw DomainError("integrate: no report times");
  for (std::size_t k = 1; k < report_times.size(); ++k) {
    if (!(report_times[k] > report_times[k - 1])) throw DomainError("integrate: report times must increase");
  }
  if (!(opt.rtol > 0.0) || !(opt.atol > 0.0) || !(opt.max_step > 0.0) || !(opt.min_step > 0.0)) {
    throw DomainError("integrate: tolerances and step bounds must be positive");
  }

  IntegrationStats local;
  IntegrationStats& st = stats ? *stats : local;
  st = {};

  std::vector<Operator> out;
  out.reserve(report_times.size());
  out.push_back(y0);

  double t = report_times.front();
  Operator y = y0;
  Operator k1(y0.rows(), y0.cols()), k2(k1), k3(k1), k4(k1), k5(k1), k6(k1), k7(k1), tmp(k1), y1(k1), err(k1);
  f(t, y, k1);
  ++st.rhs_evaluations;

  double h = std::min(opt.initial_step, opt.max_step);
  bool last_rejected = false;

  for (std::size_t next = 1; next < report_times.size(); ++next) {
    const double t_report = report_times[next];
    while (t < t_report) {
      if (st.accepted + st.rejected >= opt.max_steps) {
        throw NumericalError("integrate: step budget exhausted before reaching t = " + std::to_string(t_report));
      }
      const double remaining = t_report - t;
      const bool clipped = h >= remaining;
      const double dt = clipped ? remaining : h;

      tmp = y + dt * a21 * k1;
      f(t + c2 * dt, tmp, k2);
      tmp = y + dt * (a31 * k1 + a32 * k2);
      f(t + c3 * dt, tmp, k3);
      tmp = y + dt * (a41 * k1 + a42 * k2 + a43 * k3);
      f(t + c4 * dt, tmp, k4);
      tmp = y + dt * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4);
      f(t + c5 * dt, tmp, k5);
      tmp = y + dt * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5);
      f(t + dt, tmp, k6);
      y1 = y + dt * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
      f(t + dt, y1, k7);
      st.rhs_evaluations += 6;
      err = dt * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);

      const double en = error_norm(err, y, y1, opt.atol, opt.rtol);
      if (!std::isfinite(en)) {
        std::ostringstream msg;
        msg << "integrate: non-finite state at t = " << t;
        throw NumericalError(msg.str());
      }
      double factor = en > 0.0 ? kSafety * std::pow(en, -0.2) : kMaxFactor;
      factor = std::clamp(factor, kMinFactor, kMaxFactor);

      if (en <= 1.0) {
        if (!clipped && dt < opt.min_step) {
          std::ostringstream msg;
          msg << "integrate: step underflow (dt = " << dt << " us) at t = " << t;
          throw NumericalError(msg.str());
        }
        t = clipped ? t_report : t + dt;
        y.swap(y1);
        k1.swap(k7);
        ++st.accepted;
        st.smallest_step = st.accepted == 1 ? dt : std::min(st.smallest_step, dt);
        st.largest_step = std::max(st.largest_step, dt);
        if (last_rejected) factor = std::min(factor, 1.0);
        last_rejected = false;
        // A clipped step says little about the natural step size; keep the larger proposal.
        h = std::min(opt.max_step, clipped ? std::max(h, dt * factor) : dt * factor);
      } else {
        ++st.rejected;
        last_rejected = true;
        h = dt * factor;
        if (h < opt.min_step) {
          std::ostringstream msg;
          msg << "integrate: tolerance not met above the minimum step (" << opt.min_step << " us) at t = " << t;
          throw NumericalError(msg.str());
        }
      }
    }
    out.push_back(y);
  }
  return out;
}

}  // namespace nvdfs
