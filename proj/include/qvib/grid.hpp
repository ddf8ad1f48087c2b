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

#include <iosfwd>
#include <string>

#include "qvib/linalg.hpp"
#include "qvib/trace.hpp"

namespace qvib {

struct Grid1D {
  Vec points;  // internal units: bohr for stretches, radians for torsions
  int n = 0;
  int qubits = 0;
  double spacing = 0.0;
};

// n uniformly spaced points spanning `extent`, centred on zero.
Grid1D build_grid(int n, double extent);
// n uniformly spaced points from lo to hi inclusive.
Grid1D build_grid_range(int n, double lo, double hi);

struct DafKineticSpec {
  double mass = 1.0;
  double sigma = 1.0;
  int m_daf = 20;
  double hbar = 1.0;
  void validate() const;
};

// sigma = sigma_ratio * spacing
DafKineticSpec default_daf(const Grid1D& g, double mass, double sigma_ratio = 1.5, int m_daf = 20);

// Distributed approximating functional for -hbar^2/2m d^2/dx^2 at separation x.
double daf_kernel(double x, const DafKineticSpec& spec);
// Toeplitz kinetic matrix, K[i][l] = dx * kernel(|i-l| dx).
Mat daf_kinetic(const Grid1D& g, const DafKineticSpec& spec);

struct PotentialSurface {
  Mat values;  // hartree, values(i, j) = V(x1_i, x2_j)
  std::string source_unit = "hartree";
  bool symmetric = false;
};

struct SyntheticPesParams {
  double barrier_kcal = 3.0;      // double-well barrier along x1
  double well_angstrom = 0.35;    // well position along x1
  double torsion_kcal = 3.0;      // torsional stiffness at the reference angle
  double gating = 0.1;            // relative barrier modulation by the torsion
  double bilinear_kcal = 0.0;     // x1*x2 coupling; adds odd/odd channels
  double torsion_ref_deg = 35.0;  // angle at which torsion terms are normalised
};

// x1 grid in bohr, x2 grid in radians.
PotentialSurface synthetic_pes(const SyntheticPesParams& p, const Grid1D& g1, const Grid1D& g2);

bool is_inversion_symmetric(const Mat& v, double tol);
// Energy unit names accepted by the PES file reader.
double hartree_per_unit(const std::string& unit);

PotentialSurface read_pes(std::istream& in);
PotentialSurface load_pes(const std::string& path);
void write_pes(std::ostream& out, const PotentialSurface& s);

struct NuclearHamiltonian2D {
  Mat matrix;
  int n1 = 0;
  int n2 = 0;
};

// H = K1 (x) I + I (x) K2 + diag(V), x1-major flattening.
NuclearHamiltonian2D assemble_h2d(const Mat& k1, const Mat& k2, const Mat& v);

struct EnergyLadderExact {
  Vec eigenvalues;
  Mat eigenvectors;
};

EnergyLadderExact exact_eigensolve(const Mat& h);

// Densities |<x|exp(-iHt)|psi0>|^2 on the schedule, via the spectral expansion.
TimeTrace classical_propagate(const Mat& h, const CVec& psi0, const SimulationSchedule& sched);

}  // namespace qvib
