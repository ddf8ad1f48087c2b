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

#include <complex>
#include <cstdint>
#include <string>

#include <Eigen/Dense>

namespace qvib {

using cplx = std::complex<double>;
using Mat = Eigen::MatrixXd;
using Vec = Eigen::VectorXd;
using CMat = Eigen::MatrixXcd;
using CVec = Eigen::VectorXcd;

inline constexpr cplx kI{0.0, 1.0};

// min over phi of ||a - e^{i phi} b||_F
double phase_aligned_distance(const CMat& a, const CMat& b);

bool is_unitary(const CMat& u, double tol);

// e^{-i H t} for Hermitian H (real symmetric here), via eigendecomposition.
CMat evolution_operator(const Mat& h, double t);

// Stable FNV-1a over bytes; used for job seeds and checksums.
std::uint64_t fnv1a(const std::string& s, std::uint64_t h = 1469598103934665603ULL);
std::uint64_t mix64(std::uint64_t x);

// Short hex digest of a complex matrix (rounded to 1e-12) for metadata.
std::string matrix_checksum(const CMat& m);

}  // namespace qvib
