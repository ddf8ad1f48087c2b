// Copyright 2026 The qvib Authors
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

// Conversion constants. Everything inside the library is in atomic units;
// these are only used at I/O boundaries.

namespace qvib::units {

inline constexpr double kPi = 3.14159265358979323846;

inline constexpr double kBohrPerAngstrom = 1.0 / 0.529177210903;
inline constexpr double kElectronMassPerAmu = 1822.888486209;
inline constexpr double kKcalPerHartree = 627.509474063;
// hartree -> THz (E/h)
inline constexpr double kThzPerHartree = 6579.683920502;
inline constexpr double kAuTimePerFs = 1.0 / 2.4188843265857e-2;
inline constexpr double kRadPerDeg = kPi / 180.0;

inline constexpr double angstrom_to_bohr(double a) { return a * kBohrPerAngstrom; }
inline constexpr double amu_to_me(double m) { return m * kElectronMassPerAmu; }
inline constexpr double fs_to_au(double t) { return t * kAuTimePerFs; }
inline constexpr double hartree_to_kcal(double e) { return e * kKcalPerHartree; }
inline constexpr double kcal_to_hartree(double e) { return e / kKcalPerHartree; }
inline constexpr double hartree_to_thz(double e) { return e * kThzPerHartree; }
inline constexpr double thz_to_hartree(double f) { return f / kThzPerHartree; }
inline constexpr double thz_to_kcal(double f) { return hartree_to_kcal(thz_to_hartree(f)); }
inline constexpr double deg_to_rad(double d) { return d * kRadPerDeg; }

}  // namespace qvib::units
