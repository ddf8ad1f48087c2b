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

#include <vector>

#include "qvib/grid.hpp"
#include "qvib/linalg.hpp"

namespace qvib {

// psi(x1, x2) = sum_a w_a left_a(x1) right_a(x2)
struct SchmidtWavepacket {
  CMat left;     // n1 x rank, orthonormal columns
  CMat right;    // n2 x rank, orthonormal columns
  Vec weights;   // descending, nonnegative
  int rank = 0;

  CMat dense() const;
};

// Keeps the smallest rank whose discarded weight sum_{a>rank} w_a^2 <= tol^2.
SchmidtWavepacket schmidt_decompose(const CMat& psi, double tol);

struct ExtractedPotential {
  Vec log_amp;  // Re log f
  Vec veff;     // -(2/dt) * unwrapped Im log f, hartree
};

// Inverts f = exp(log_amp - i veff dt/2). dt in fs.
ExtractedPotential extract_effective_potential(const CVec& f, double dt_fs);

struct PotentialChannel {
  CVec f1;  // factor along x1, sqrt(s) absorbed
  CVec f2;  // factor along x2, sqrt(s) absorbed
  double singular_value = 0.0;
  int parity = 0;  // +1 even/even, -1 odd/odd, 0 unsplit
  ExtractedPotential p1;
  ExtractedPotential p2;
};

struct PotentialChannelSet {
  std::vector<PotentialChannel> channels;
  double dt_fs = 0.0;
  double tol = 0.0;
  double reconstruction_error = 0.0;
  // largest |log A| over retained channels (0 when every |f| == 1)
  double max_log_amp_deviation = 0.0;
  bool sector_split = false;

  int rank() const { return static_cast<int>(channels.size()); }
  CMat dense() const;
};

// Elementwise half-step propagator exp(-i V dt/2) for V in hartree, dt in fs.
CMat potential_half_propagator(const Mat& v, double dt_fs);

// Schmidt channels of exp(-i V dt/2). Inversion-symmetric surfaces are split
// into even/even and odd/odd sectors so every factor has definite parity.
PotentialChannelSet factor_potential_propagator(const PotentialSurface& v, double dt_fs, double tol);

struct EffectiveHamiltonian {
  int dim = 0;    // 1 or 2
  int gamma = 0;  // second-half channel
  int beta = 0;   // first-half channel
  Mat matrix;
};

// H = K + diag((v_gamma + v_beta) / 2)
EffectiveHamiltonian build_effective_hamiltonian(const Mat& k, const Vec& v_gamma, const Vec& v_beta,
                                                 int dim = 0, int gamma = 0, int beta = 0);

// All channel pairs (gamma, beta) for one dimension.
std::vector<EffectiveHamiltonian> effective_family(const Mat& k, const PotentialChannelSet& ch, int dim);

// exp(-i K dt) for a kinetic matrix, dt in fs.
CMat kinetic_propagator(const Mat& k, double dt_fs);

// One symmetric split step assembled channel by channel; result normalized.
CMat propagate_mps_step(const SchmidtWavepacket& wp, const PotentialChannelSet& ch, const CMat& kprop1,
                        const CMat& kprop2);

// Dense reference: P o (K1 (P o psi) K2^T), P = exp(-iV dt/2).
CMat dense_trotter_step(const CMat& psi, const Mat& v, const CMat& kprop1, const CMat& kprop2, double dt_fs);

}  // namespace qvib
