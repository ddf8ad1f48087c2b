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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "qvib/blocks.hpp"
#include "qvib/errors.hpp"
#include "qvib/factorize.hpp"
#include "qvib/grid.hpp"
#include "qvib/units.hpp"

using namespace qvib;

namespace {

std::vector<double> sorted(const Vec& v) {
  std::vector<double> s(v.data(), v.data() + v.size());
  std::sort(s.begin(), s.end());
  return s;
}

std::vector<double> merged(const std::pair<Vec, Vec>& p) {
  Vec all(p.first.size() + p.second.size());
  all << p.first, p.second;
  return sorted(all);
}

// kinetic part of an effective Hamiltonian of the default model, plus its potential
struct Eff {
  Mat k;
  Vec vg, vb;
};

Eff default_effective() {
  const auto g1 = build_grid(8, units::angstrom_to_bohr(1.1));
  const auto g2 = build_grid_range(8, units::deg_to_rad(-35), units::deg_to_rad(35));
  const auto pes = synthetic_pes({}, g1, g2);
  const auto ch = factor_potential_propagator(pes, 0.25, 1e-12);
  Eff e;
  e.k = daf_kinetic(g1, default_daf(g1, units::amu_to_me(1.00728)));
  e.vg = ch.channels[0].p1.veff;
  e.vb = ch.channels[0].p1.veff;
  for (const auto& c : ch.channels)
    if (c.p1.veff.size() && &c != &ch.channels[0]) {
      e.vb = c.p1.veff;
      break;
    }
  return e;
}

}  // namespace

TEST_CASE("givens matrix is an involution") {
  for (int n : {2, 4, 8, 16}) {
    const Mat g = givens_matrix(n);
    CHECK((g * g - Mat::Identity(n, n)).cwiseAbs().maxCoeff() <= 1e-12);
    CHECK((g - g.transpose()).cwiseAbs().maxCoeff() == 0.0);
  }
  const Vec a = givens_signs(8);
  for (int i = 0; i < 4; ++i) CHECK(a(i) == -1);
  for (int i = 4; i < 8; ++i) CHECK(a(i) == 1);
  CHECK_THROWS_AS(givens_matrix(7), DomainError);
  CHECK_THROWS_AS(givens_transform(Mat::Identity(5, 5)), DomainError);
}

TEST_CASE("transform of identity and of symmetric effective hamiltonians") {
  const auto id = givens_transform(Mat::Identity(8, 8));
  CHECK((id.h_tilde - Mat::Identity(8, 8)).cwiseAbs().maxCoeff() == 0.0);
  CHECK(id.offdiag_residual == 0.0);

  const Eff e = default_effective();
  const Mat h = build_effective_hamiltonian(e.k, e.vg, e.vb).matrix;
  const auto d = givens_transform(h);
  CHECK(d.offdiag_residual <= 1e-12);
  const Mat g = givens_matrix(8);
  CHECK((d.h_tilde - g * h * g).cwiseAbs().maxCoeff() <= 1e-12);
  const auto want = sorted(exact_eigensolve(h).eigenvalues);
  const auto got = merged(block_spectra(d));
  for (int i = 0; i < 8; ++i) CHECK(std::abs(got[i] - want[i]) <= 1e-10);

  // on-diagonal blocks entrywise: K[i][l] + a_i K[i][mirror l] + potential on the diagonal
  const Vec a = d.signs;
  const Vec v = 0.5 * (e.vg + e.vb);
  for (int i = 0; i < 4; ++i)
    for (int l = 0; l < 4; ++l) {
      const double pot = i == l ? 0.5 * (v(i) + v(7 - l)) : 0.0;
      CHECK(std::abs(d.upper(i, l) - (e.k(i, l) + a(i) * e.k(i, 7 - l) + pot)) <= 1e-12);
      const int I = i + 4, L = l + 4;
      const double potl = I == L ? 0.5 * (v(I) + v(7 - L)) : 0.0;
      CHECK(std::abs(d.lower(i, l) - (e.k(I, L) + a(I) * e.k(I, 7 - L) + potl)) <= 1e-12);
    }
}

TEST_CASE("asymmetric potential leaves the predicted off-diagonal coupling") {
  const Eff e = default_effective();
  Vec vg = e.vg, vb = e.vb;
  vg(1) += 2e-3;
  vb(6) -= 1e-3;
  const Mat h = build_effective_hamiltonian(e.k, vg, vb).matrix;
  const auto d = givens_transform(h);
  CHECK(d.offdiag_residual > 0.0);
  const Mat off = d.h_tilde.topRightCorner(4, 4);
  double worst = 0;
  for (int i = 0; i < 4; ++i)
    for (int l = 0; l < 4; ++l) {
      const int col = l + 4;
      const double want =
          col == 7 - i ? 0.25 * std::abs((vg(i) - vg(7 - i)) + (vb(i) - vb(7 - i))) : 0.0;
      CHECK(std::abs(std::abs(off(i, l)) - want) <= 1e-12);
      worst = std::max(worst, want);
    }
  CHECK(d.offdiag_residual == doctest::Approx(worst).epsilon(1e-12));
  CHECK_THROWS_AS(block_spectra(d, 1e-9), DomainError);
}

TEST_CASE("block spectra") {
  std::mt19937_64 rng(4);
  std::normal_distribution<double> nd;
  for (int t = 0; t < 20; ++t) {
    Mat h(8, 8);
    for (int i = 0; i < 8; ++i)
      for (int l = i; l < 8; ++l) h(i, l) = h(l, i) = nd(rng);
    // centrosymmetric part
    const Mat j = Mat::Identity(8, 8).rowwise().reverse();
    const Mat c = 0.5 * (h + j * h * j);
    const auto d = givens_transform(c);
    CHECK(d.offdiag_residual <= 1e-12);
    const auto got = merged(block_spectra(d));
    const auto want = sorted(exact_eigensolve(c).eigenvalues);
    for (int i = 0; i < 8; ++i) CHECK(std::abs(got[i] - want[i]) <= 1e-10);
  }
  // diagonal with mirror-equal entries
  Mat m = Mat::Zero(8, 8);
  for (int i = 0; i < 4; ++i) m(i, i) = m(7 - i, 7 - i) = i + 1;
  const auto got = merged(block_spectra(givens_transform(m)));
  const std::vector<double> want{1, 1, 2, 2, 3, 3, 4, 4};
  for (int i = 0; i < 8; ++i) CHECK(got[i] == doctest::Approx(want[i]));

  BlockDecomposition bad = givens_transform(Mat::Identity(8, 8));
  bad.offdiag_residual = 0.1;
  CHECK_THROWS_AS(block_spectra(bad, 1e-9), DomainError);
}

TEST_CASE("basis table") {
  const auto t = shuffled_basis_map(8);
  REQUIRE(t.rows.size() == 8);
  CHECK(t.rows[3].bits == "011");
  CHECK(t.rows[3].transformed_label == "(|x3>+|x4>)/sqrt2");
  CHECK(t.rows[3].shuffled_label == "(|x3>+|x4>)/sqrt2");
  CHECK(t.rows[4].shuffled_label == "(|x7>-|x0>)/sqrt2");
  CHECK(t.rows[7].shuffled_label == "(|x4>-|x3>)/sqrt2");
  const double r = 1 / std::sqrt(2.0);
  CHECK(t.rows[4].shuffled(7) == doctest::Approx(r));
  CHECK(t.rows[4].shuffled(0) == doctest::Approx(-r));

  for (int n : {4, 8}) {
    const auto tb = shuffled_basis_map(n);
    const Mat a = tb.transformed_matrix(), s = tb.shuffled_matrix();
    CHECK((a.transpose() * a - Mat::Identity(n, n)).cwiseAbs().maxCoeff() <= 1e-12);
    CHECK((s.transpose() * s - Mat::Identity(n, n)).cwiseAbs().maxCoeff() <= 1e-12);
    // upper halves agree; the lower half is the reversed order
    const int h = n / 2;
    CHECK((a.leftCols(h) - s.leftCols(h)).cwiseAbs().maxCoeff() == 0.0);
    for (int k = 0; k < h; ++k) CHECK((s.col(h + k) - a.col(n - 1 - k)).cwiseAbs().maxCoeff() == 0.0);
  }
  // the two swaps 5<->8 and 6<->7 (1-based) of the lower block
  const Mat a = t.transformed_matrix(), s = t.shuffled_matrix();
  CHECK((s.col(4) - a.col(7)).norm() == 0.0);
  CHECK((s.col(5) - a.col(6)).norm() == 0.0);
  CHECK(t.to_csv().rfind("computational,transformed,shuffled\n|000>,", 0) == 0);
  CHECK_THROWS_AS(shuffled_basis_map(16), DomainError);
}

TEST_CASE("hadamard readout") {
  const auto t = shuffled_basis_map(8);
  Vec c = Vec::Zero(8);
  c(0) = 1000;
  const Vec rho = hadamard_grid_readout(c, t);
  CHECK(rho(7) == 1.0);
  CHECK(rho.sum() == 1.0);
  const Vec u = hadamard_grid_readout(Vec::Constant(8, 5.0), t);
  for (int i = 0; i < 8; ++i) CHECK(u(i) == doctest::Approx(0.125));
  const auto p = readout_permutation(8);
  std::vector<int> q = p;
  std::sort(q.begin(), q.end());
  for (int i = 0; i < 8; ++i) CHECK(q[i] == i);
  Vec r(8);
  r << 1, 2, 3, 4, 5, 6, 7, 8;
  CHECK(hadamard_grid_readout(r, t).sum() == doctest::Approx(1.0));
  CHECK_THROWS_AS(hadamard_grid_readout(Vec::Zero(4), t), DomainError);
}
