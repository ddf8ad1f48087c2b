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

#include "qvib/blocks.hpp"

#include <cmath>
#include <sstream>

#include "qvib/errors.hpp"

namespace qvib {

namespace {

std::string bitstring(int k, int width) {
  std::string s(width, '0');
  for (int b = 0; b < width; ++b)
    if (k >> (width - 1 - b) & 1) s[b] = '1';
  return s;
}

int width_of(int n) {
  int w = 0;
  while ((1 << w) < n) ++w;
  return w;
}

// "(|xa>+|xb>)/sqrt2" with a listed first
std::string pair_label(int a, int b, int sign) {
  std::ostringstream o;
  o << "(|x" << a << ">" << (sign > 0 ? '+' : '-') << "|x" << b << ">)/sqrt2";
  return o.str();
}

}  // namespace

Vec givens_signs(int n) {
  Vec a(n);
  for (int i = 0; i < n; ++i) a(i) = (2 * i - n >= 0) ? 1.0 : -1.0;
  return a;
}

Mat givens_matrix(int n) {
  if (n < 2 || n % 2) throw DomainError("givens: n must be even");
  const Vec a = givens_signs(n);
  const double r = 1.0 / std::sqrt(2.0);
  Mat g = Mat::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    g(i, i) += a(i) * r;
    g(i, n - 1 - i) += r;
  }
  return g;
}

BlockDecomposition givens_transform(const Mat& h) {
  const int n = static_cast<int>(h.rows());
  if (h.cols() != n || n % 2) throw DomainError("givens_transform: n must be even and H square");
  BlockDecomposition d;
  d.signs = givens_signs(n);
  // elementwise form of G H G; same arithmetic order for mirrored entries
  const Vec& a = d.signs;
  d.h_tilde.resize(n, n);
  for (int i = 0; i < n; ++i)
    for (int l = 0; l < n; ++l) {
      const int mi = n - 1 - i, ml = n - 1 - l;
      d.h_tilde(i, l) =
          0.5 * ((a(i) * a(l) * h(i, l) + h(mi, ml)) + (a(i) * h(i, ml) + a(l) * h(mi, l)));
    }
  const int m = n / 2;
  d.upper = d.h_tilde.topLeftCorner(m, m);
  d.lower = d.h_tilde.bottomRightCorner(m, m);
  d.offdiag_residual = std::max(d.h_tilde.topRightCorner(m, m).cwiseAbs().maxCoeff(),
                                d.h_tilde.bottomLeftCorner(m, m).cwiseAbs().maxCoeff());
  return d;
}

std::pair<Vec, Vec> block_spectra(const BlockDecomposition& dec, double threshold) {
  if (dec.offdiag_residual > threshold)
    throw DomainError("block_spectra: off-diagonal residual " + std::to_string(dec.offdiag_residual) +
                      " above threshold; blocks are not independent");
  Eigen::SelfAdjointEigenSolver<Mat> up(dec.upper, Eigen::EigenvaluesOnly);
  Eigen::SelfAdjointEigenSolver<Mat> lo(dec.lower, Eigen::EigenvaluesOnly);
  return {up.eigenvalues(), lo.eigenvalues()};
}

Mat BasisTable::transformed_matrix() const {
  Mat m(n, n);
  for (int k = 0; k < n; ++k) m.col(k) = rows[k].transformed;
  return m;
}

Mat BasisTable::shuffled_matrix() const {
  Mat m(n, n);
  for (int k = 0; k < n; ++k) m.col(k) = rows[k].shuffled;
  return m;
}

std::string BasisTable::to_csv() const {
  std::ostringstream o;
  o << "computational,transformed,shuffled\n";
  for (const auto& r : rows) o << '|' << r.bits << ">," << r.transformed_label << ',' << r.shuffled_label << '\n';
  return o.str();
}

BasisTable shuffled_basis_map(int n) {
  if (n != 8 && n != 4) throw DomainError("shuffled_basis_map: n must be 4 or 8");
  const int w = width_of(n), h = n / 2;
  const double r = 1.0 / std::sqrt(2.0);
  BasisTable t;
  t.n = n;
  for (int k = 0; k < n; ++k) {
    BasisRow row;
    row.bits = bitstring(k, w);
    row.transformed = Vec::Zero(n);
    row.shuffled = Vec::Zero(n);
    const int mk = n - 1 - k;
    if (k < h) {
      row.transformed(k) += r;
      row.transformed(mk) += r;
      row.transformed_label = pair_label(k, mk, +1);
      row.shuffled = row.transformed;
      row.shuffled_label = row.transformed_label;
    } else {
      row.transformed(k) += r;
      row.transformed(mk) -= r;
      row.transformed_label = pair_label(k, mk, -1);
      const int b = k - h;
      row.shuffled(n - 1 - b) += r;
      row.shuffled(b) -= r;
      row.shuffled_label = pair_label(n - 1 - b, b, -1);
    }
    t.rows.push_back(std::move(row));
  }
  return t;
}

std::vector<int> readout_permutation(int n) {
  std::vector<int> p(n);
  const int h = n / 2;
  for (int b = 0; b < h; ++b) {
    p[b] = n - 1 - b;
    p[h + b] = b;
  }
  return p;
}

Vec hadamard_grid_readout(const Vec& counts, const BasisTable& table) {
  if (counts.size() != table.n) throw DomainError("hadamard_grid_readout: count vector length mismatch");
  const auto perm = readout_permutation(table.n);
  const double total = counts.sum();
  Vec rho = Vec::Zero(table.n);
  for (int k = 0; k < table.n; ++k) rho(perm[k]) = counts(k);
  return total > 0 ? Vec(rho / total) : rho;
}

}  // namespace qvib
