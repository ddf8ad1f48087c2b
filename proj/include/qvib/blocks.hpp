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

#include <string>
#include <utility>
#include <vector>

#include "qvib/linalg.hpp"

namespace qvib {

// alpha_i = sgn(i - n/2), sgn(0) = +1
Vec givens_signs(int n);
// G = (diag(alpha) + J) / sqrt 2, J the reversal; symmetric and G^2 = I.
Mat givens_matrix(int n);

struct BlockDecomposition {
  Mat h_tilde;
  Mat upper;  // rows/cols 0..n/2-1 (selector qubit 0)
  Mat lower;  // rows/cols n/2..n-1
  double offdiag_residual = 0.0;
  Vec signs;
};

BlockDecomposition givens_transform(const Mat& h);

// Throws when the off-diagonal residual exceeds `threshold`.
std::pair<Vec, Vec> block_spectra(const BlockDecomposition& dec, double threshold = 1e-9);

struct BasisRow {
  std::string bits;
  Vec transformed;  // grid-basis coefficients
  Vec shuffled;
  std::string transformed_label;
  std::string shuffled_label;
};

struct BasisTable {
  int n = 0;
  std::vector<BasisRow> rows;

  Mat transformed_matrix() const;  // columns = rows[k].transformed
  Mat shuffled_matrix() const;
  std::string to_csv() const;
};

// n = 8 or n = 4.
BasisTable shuffled_basis_map(int n);

// Computational outcome index after the selector Hadamard -> grid index.
// |0 b> -> x^{n-1-b}, |1 b> -> x^b.
std::vector<int> readout_permutation(int n);

// Relabel outcome counts (or probabilities) onto grid points, normalized to 1.
Vec hadamard_grid_readout(const Vec& counts, const BasisTable& table);

}  // namespace qvib
