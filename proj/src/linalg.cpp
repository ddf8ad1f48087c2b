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

#include "qvib/linalg.hpp"

#include <cmath>
#include <cstdio>

namespace qvib {

double phase_aligned_distance(const CMat& a, const CMat& b) {
  // best phase aligns <b, a> to the real axis; evaluate the difference directly
  // (the expanded |a|^2 + |b|^2 - 2|<b,a>| form loses half the digits)
  const cplx ov = (b.adjoint() * a).trace();
  const cplx ph = std::abs(ov) > 0 ? ov / std::abs(ov) : cplx(1.0);
  return (a - ph * b).norm();
}

bool is_unitary(const CMat& u, double tol) {
  if (u.rows() != u.cols()) return false;
  return (u.adjoint() * u - CMat::Identity(u.rows(), u.cols())).norm() <= tol;
}

CMat evolution_operator(const Mat& h, double t) {
  Eigen::SelfAdjointEigenSolver<Mat> es(h);
  const Mat& v = es.eigenvectors();
  CVec ph(h.rows());
  for (Eigen::Index k = 0; k < h.rows(); ++k) ph(k) = std::exp(-kI * (es.eigenvalues()(k) * t));
  return v.cast<cplx>() * ph.asDiagonal() * v.transpose().cast<cplx>();
}

std::uint64_t fnv1a(const std::string& s, std::uint64_t h) {
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

std::uint64_t mix64(std::uint64_t x) {
  // splitmix64 finalizer
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::string matrix_checksum(const CMat& m) {
  std::uint64_t h = 1469598103934665603ULL;
  char buf[64];
  for (Eigen::Index j = 0; j < m.cols(); ++j)
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
      double re = m(i, j).real(), im = m(i, j).imag();
      if (std::abs(re) < 5e-13) re = 0.0;
      if (std::abs(im) < 5e-13) im = 0.0;
      std::snprintf(buf, sizeof buf, "%.12f,%.12f;", re, im);
      h = fnv1a(buf, h);
    }
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace qvib
