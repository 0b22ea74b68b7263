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

#include <numbers>

// Internal unit system: hbar = 1, time in microseconds, angular frequency in
// rad/us, magnetic field in gauss. Quantities quoted as f = omega/2pi are
// multiplied by 2pi on the way in.
namespace nvdfs::units {

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

constexpr double hz(double f) { return kTwoPi * f * 1e-6; }
constexpr double khz(double f) { return kTwoPi * f * 1e-3; }
constexpr double mhz(double f) { return kTwoPi * f; }
constexpr double ghz(double f) { return kTwoPi * f * 1e3; }

constexpr double to_mhz(double omega) { return omega / kTwoPi; }
constexpr double to_khz(double omega) { return omega / kTwoPi * 1e3; }

/// Gyromagnetic ratios quoted as (gamma/2pi) in MHz/G.
constexpr double mhz_per_gauss(double g) { return kTwoPi * g; }
constexpr double khz_per_gauss(double g) { return kTwoPi * g * 1e-3; }

}  // namespace nvdfs::units
