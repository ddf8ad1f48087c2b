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
#include <sstream>

#include "qvib/errors.hpp"
#include "qvib/grid.hpp"
#include "qvib/trace.hpp"
#include "qvib/units.hpp"

using namespace qvib;

namespace {

Mat default_surface() {
  const auto g1 = build_grid(8, units::angstrom_to_bohr(1.1));
  const auto g2 = build_grid_range(8, units::deg_to_rad(-35), units::deg_to_rad(35));
  return synthetic_pes({}, g1, g2).values;
}

Mat random_sym(int n, std::mt19937_64& rng) {
  std::normal_distribution<double> nd;
  Mat a(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) a(i, j) = nd(rng);
  return (a + a.transpose()) / 2;
}

}  // namespace

TEST_CASE("grids") {
  const auto g = build_grid(8, 1.1);
  CHECK(g.n == 8);
  CHECK(g.qubits == 3);
  CHECK(g.spacing == doctest::Approx(1.1 / 7).epsilon(1e-14));
  for (int i = 1; i < g.n; ++i) CHECK(g.points(i) - g.points(i - 1) == doctest::Approx(g.spacing).epsilon(1e-12));
  CHECK(g.points(0) == -g.points(7));

  const auto two = build_grid(2, 1.0);
  CHECK(two.points(0) == doctest::Approx(-0.5));
  CHECK(two.points(1) == doctest::Approx(0.5));

  const auto ang = build_grid_range(8, -35, 35);
  CHECK(ang.spacing == doctest::Approx(10.0));

  CHECK_THROWS_AS(build_grid(6, 1.0), DomainError);
  CHECK_THROWS_AS(build_grid(1, 1.0), DomainError);
  CHECK_THROWS_AS(build_grid(8, 0.0), DomainError);
  CHECK_THROWS_AS(build_grid(8, -1.0), DomainError);
}

TEST_CASE("daf kinetic: toeplitz, symmetric, annihilates constants") {
  for (int n : {8, 16, 64}) {
    const auto g = build_grid(n, 4.0);
    const Mat k = daf_kinetic(g, default_daf(g, 1836.0));
    for (int i = 0; i < n; ++i)
      for (int l = 0; l < n; ++l) {
        CHECK(k(i, l) == k(l, i));
        if (i > 0 && l > 0) CHECK(k(i, l) == k(i - 1, l - 1));
      }
  }
  const auto fine = build_grid(64, 16.0);
  const Mat k = daf_kinetic(fine, default_daf(fine, 1.0));
  const Vec c = Vec::Constant(64, 3.0);
  // interior rows; the band is truncated at the grid edge
  const Vec kc = k * c;
  const double norm = k.norm();
  for (int i = 16; i < 48; ++i) CHECK(std::abs(kc(i)) / 3.0 <= 1e-6 * norm);

  DafKineticSpec bad;
  bad.m_daf = 3;
  CHECK_THROWS_AS(bad.validate(), DomainError);
  bad.m_daf = 20;
  bad.sigma = 0;
  CHECK_THROWS_AS(bad.validate(), DomainError);
}

TEST_CASE("daf kinetic: gaussian second derivative") {
  const auto g = build_grid(64, 16.0);
  const Mat k = daf_kinetic(g, default_daf(g, 1.0));
  Vec psi(64), want(64);
  for (int i = 0; i < 64; ++i) {
    const double x = g.points(i);
    psi(i) = std::exp(-x * x / 2);
    want(i) = -0.5 * (x * x - 1) * std::exp(-x * x / 2);
  }
  const Vec got = k * psi;
  double worst = 0;
  for (int i = 16; i < 48; ++i) worst = std::max(worst, std::abs(got(i) - want(i)));
  CHECK(worst / want.cwiseAbs().maxCoeff() <= 1e-4);
}

TEST_CASE("synthetic surface") {
  const Mat v = default_surface();
  for (int i = 0; i < 8; ++i)
    for (int j = 0; j < 8; ++j) CHECK(v(i, j) == v(7 - i, 7 - j));
  // double well along x1 next to the torsional centre
  for (int j : {3, 4}) {
    int minima = 0;
    for (int i = 0; i < 8; ++i) {
      const bool left = i == 0 || v(i, j) < v(i - 1, j);
      const bool right = i == 7 || v(i, j) < v(i + 1, j);
      minima += left && right;
    }
    CHECK(minima == 2);
  }
  // no coupling: additive surface, rank-one propagator
  SyntheticPesParams p;
  p.gating = 0;
  p.bilinear_kcal = 0;
  const auto g1 = build_grid(8, units::angstrom_to_bohr(1.1));
  const auto g2 = build_grid_range(8, units::deg_to_rad(-35), units::deg_to_rad(35));
  const Mat vs = synthetic_pes(p, g1, g2).values;
  CMat e(8, 8);
  for (int i = 0; i < 8; ++i)
    for (int j = 0; j < 8; ++j) e(i, j) = std::exp(-kI * vs(i, j) * 10.0);
  Eigen::JacobiSVD<CMat> svd(e);
  CHECK(svd.singularValues()(1) / svd.singularValues()(0) < 1e-12);
  CHECK(synthetic_pes({}, g1, g2).symmetric);
}

TEST_CASE("pes file io") {
  const auto g1 = build_grid(8, units::angstrom_to_bohr(1.1));
  const auto g2 = build_grid_range(8, units::deg_to_rad(-35), units::deg_to_rad(35));
  const auto s = synthetic_pes({}, g1, g2);
  std::stringstream io;
  write_pes(io, s);
  const auto back = read_pes(io);
  CHECK(back.symmetric);
  CHECK((back.values - s.values).cwiseAbs().maxCoeff() == 0.0);

  std::stringstream kcal("pes v1 2 2 kcal/mol 1\n1 2\n2 1\n");
  const auto k = read_pes(kcal);
  CHECK(k.values(0, 1) == doctest::Approx(units::kcal_to_hartree(2.0)));

  std::stringstream asym("pes v1 2 2 hartree 1\n1 2\n2 1.5\n");
  CHECK_THROWS_AS(read_pes(asym), ParseError);
  std::stringstream shape("pes v1 7 8 hartree 0\n");
  CHECK_THROWS_AS(read_pes(shape), ParseError);
  std::stringstream shortf("pes v1 2 2 hartree 0\n1 2 3\n");
  CHECK_THROWS_AS(read_pes(shortf), ParseError);
  std::stringstream header("pez v1 2 2 hartree 0\n1 2 3 4\n");
  CHECK_THROWS_AS(read_pes(header), ParseError);
  std::stringstream unit("pes v1 2 2 furlongs 0\n1 2 3 4\n");
  CHECK_THROWS_AS(read_pes(unit), ParseError);
  CHECK_THROWS_AS(load_pes("/nonexistent/pes.txt"), ParseError);
}

TEST_CASE("h2d assembly and kronecker-sum spectrum") {
  std::mt19937_64 rng(3);
  const Mat k1 = random_sym(4, rng), k2 = random_sym(4, rng);
  const auto h = assemble_h2d(k1, k2, Mat::Zero(4, 4));
  CHECK(h.matrix == h.matrix.transpose());
  Vec e = exact_eigensolve(h.matrix).eigenvalues;
  const Vec a = exact_eigensolve(k1).eigenvalues, b = exact_eigensolve(k2).eigenvalues;
  std::vector<double> sums;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) sums.push_back(a(i) + b(j));
  std::sort(sums.begin(), sums.end());
  for (int i = 0; i < 16; ++i) CHECK(e(i) == doctest::Approx(sums[i]).epsilon(1e-9));
  CHECK_THROWS_AS(assemble_h2d(k1, k2, Mat::Zero(3, 4)), DomainError);

  // V = 0 on the default grids is still a symmetric kronecker sum
  const Mat v = default_surface();
  const auto g1 = build_grid(8, units::angstrom_to_bohr(1.1));
  const auto g2 = build_grid_range(8, units::deg_to_rad(-35), units::deg_to_rad(35));
  const auto full = assemble_h2d(daf_kinetic(g1, default_daf(g1, units::amu_to_me(1.00728))),
                                 daf_kinetic(g2, default_daf(g2, units::amu_to_me(2.0))), v);
  CHECK(full.matrix == full.matrix.transpose());
  CHECK(full.matrix.diagonal()(9) - v(1, 1) == doctest::Approx(full.matrix.diagonal()(0) - v(0, 0)));
}

TEST_CASE("harmonic oscillator ground state") {
  const int n = 32;
  const double m = 1.0, w = 1.0;
  const auto g = build_grid(n, 12.0);
  const Mat k = daf_kinetic(g, default_daf(g, m));
  Mat v(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) v(i, j) = 0.5 * m * w * w * (g.points(i) * g.points(i) + g.points(j) * g.points(j));
  const auto h = assemble_h2d(k, k, v);
  CHECK(exact_eigensolve(h.matrix).eigenvalues(0) == doctest::Approx(w).epsilon(0.01));
}

TEST_CASE("exact eigensolve") {
  Mat d = Mat::Zero(3, 3);
  d.diagonal() << 3, 1, 2;
  const Vec e = exact_eigensolve(d).eigenvalues;
  CHECK(e(0) == 1);
  CHECK(e(1) == 2);
  CHECK(e(2) == 3);
  Mat x(2, 2);
  x << 0, 1, 1, 0;
  const Vec ex = exact_eigensolve(x).eigenvalues;
  CHECK(ex(0) == doctest::Approx(-1));
  CHECK(ex(1) == doctest::Approx(1));

  std::mt19937_64 rng(11);
  for (int t = 0; t < 20; ++t) {
    const Mat h = random_sym(8, rng);
    const auto l = exact_eigensolve(h);
    CHECK((l.eigenvectors.transpose() * l.eigenvectors - Mat::Identity(8, 8)).norm() <= 1e-12);
    CHECK((h * l.eigenvectors - l.eigenvectors * l.eigenvalues.asDiagonal()).norm() <= 1e-10 * h.norm());
  }
  Mat ns(2, 2);
  ns << 0, 1, 2, 0;
  CHECK_THROWS_AS(exact_eigensolve(ns), DomainError);
}

TEST_CASE("schedules reproduce the sampling table") {
  struct Row {
    double dt, t, dw, wmax, rel;
  };
  for (const Row& r : {Row{2.5, 400, 1.250, 200.0, 1e-12}, Row{1.47, 235, 2.125, 340.4, 5e-3},
                       Row{100, 16000, 0.03125, 5.0, 1e-12}, Row{7.0, 1120, 0.446, 71.4, 5e-3}}) {
    const SimulationSchedule s{r.dt, r.t};
    CHECK(s.n_steps() == 160);
    CHECK(s.d_omega_thz() == doctest::Approx(r.dw).epsilon(r.rel));
    CHECK(s.omega_max_thz() == doctest::Approx(r.wmax).epsilon(r.rel));
  }
  // the table prints 0.031 and 0.445
  CHECK(std::round(SimulationSchedule{100, 16000}.d_omega_thz() * 1000) / 1000 == doctest::Approx(0.031));
  CHECK(SimulationSchedule{7, 1120}.d_omega_thz() == doctest::Approx(0.445).epsilon(5e-3));
  CHECK_THROWS_AS((SimulationSchedule{0.0, 10}.validate()), DomainError);
  CHECK_THROWS_AS((SimulationSchedule{1.0, -10}.validate()), DomainError);
}

TEST_CASE("classical propagation") {
  std::mt19937_64 rng(5);
  const Mat h = random_sym(6, rng) * 1e-3;
  const auto l = exact_eigensolve(h);
  const SimulationSchedule s{2.0, 200.0};

  CVec eig = l.eigenvectors.col(2).cast<cplx>();
  const auto st = classical_propagate(h, eig, s);
  for (int k = 0; k < st.n_times(); ++k) CHECK((st.density.row(k) - st.density.row(0)).cwiseAbs().maxCoeff() <= 1e-12);

  CVec psi = CVec::Zero(6);
  psi(1) = cplx(0.6, 0);
  psi(4) = cplx(0, 0.8);
  const auto tr = classical_propagate(h, psi, s);
  CHECK(tr.density(0, 1) == doctest::Approx(0.36));
  CHECK(tr.density(0, 4) == doctest::Approx(0.64));
  for (int k = 0; k < tr.n_times(); ++k) CHECK(std::abs(tr.density.row(k).sum() - 1) <= 1e-10);

  // two-level beat: density oscillates at (E1 - E0) / h
  CVec two = (l.eigenvectors.col(0) + l.eigenvectors.col(3)).cast<cplx>() / std::sqrt(2.0);
  const auto bt = classical_propagate(h, two, s);
  const double w = l.eigenvalues(3) - l.eigenvalues(0);
  for (int k = 0; k < bt.n_times(); ++k) {
    const double t = units::fs_to_au(k * s.dt_fs);
    const double x = 0.5 * (std::pow(l.eigenvectors(2, 0), 2) + std::pow(l.eigenvectors(2, 3), 2)) +
                     l.eigenvectors(2, 0) * l.eigenvectors(2, 3) * std::cos(w * t);
    CHECK(bt.density(k, 2) == doctest::Approx(x).epsilon(1e-10));
  }
  CHECK_THROWS_AS(classical_propagate(h, CVec::Constant(6, 1.0), s), DomainError);
}
