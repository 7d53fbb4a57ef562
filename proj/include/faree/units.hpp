// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <numbers>

namespace faree {

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kSpeedOfLight = 2.99792458e8;      // m/s
inline constexpr double kVacuumPermittivity = 8.8541878128e-12; // F/m
inline constexpr double kVacuumPermeability = 1.25663706212e-6; // H/m

inline double dbm_to_watt(double dbm) { return std::pow(10.0, (dbm - 30.0) / 10.0); }
inline double watt_to_dbm(double watt) { return 10.0 * std::log10(watt) + 30.0; }

}  // namespace faree
