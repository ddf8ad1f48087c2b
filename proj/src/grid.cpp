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

#include "qvib/grid.hpp"

#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "qvib/errors.hpp"
#include "qvib/units.hpp"

namespace qvib {

namespace {

bool is_pow2(long n) { return n >= 2 && (n & (n - 1)) == 0; }

int log2i(int n) {
  int q = 0;
  while ((1 << q) < n) ++q;
  return q;
}

// physicists' Hermite polynomials H_0..H_kmax at z
Vec hermite_table(double z, int kmax) {
  Vec h(kmax + 1);
  h(0) = 1.0;
  if (kmax >= 1) h(1) = 2.0 * z;
  for (int k = 1; k < kmax; ++k) h(k + 1) = 2.0 * z * h(k) - 2.0 * k * h(k - 1);
  return h;
}

}  // namespace

Grid1D build_grid(int n, double extent) {
  if (!(extent > 0.0)) throw DomainError("build_grid: extent must be positive");
  return build_grid_range(n, -extent / 2.0, extent / 2.0);
}

Grid1D build_grid_range(int n, double lo, double hi) {
  if (!is_pow2(n)) throw DomainError("build_grid: n must be a power of two >= 2");
  if (!(hi > lo)) throw DomainError("build_grid: empty range");
  Grid1D g;
  g.n = n;
  g.qubits = log2i(n);
  g.spacing = (hi - lo) / (n - 1);
  g.points.resize(n);
  // symmetric construction so mirrored points are exact negatives when lo = -hi
  for (int i = 0; i < n; ++i) {
    const double c = 0.5 * (lo + hi), h = 0.5 * (hi - lo);
    g.points(i) = c + h * (2.0 * i - (n - 1)) / (n - 1);
  }
  return g;
}

void DafKineticSpec::validate() const {
  if (!(mass > 0.0)) throw DomainError("daf: mass must be positive");
  if (!(sigma > 0.0)) throw DomainError("daf: sigma must be positive");
  if (m_daf < 2 || m_daf % 2 != 0) throw DomainError("daf: order must be even and >= 2");
}

DafKineticSpec default_daf(const Grid1D& g, double mass, double sigma_ratio, int m_daf) {
  DafKineticSpec s;
  s.mass = mass;
  s.sigma = sigma_ratio * g.spacing;
  s.m_daf = m_daf;
  return s;
}

double daf_kernel(double x, const DafKineticSpec& spec) {
  const double sig = spec.sigma;
  const double z = x / (std::sqrt(2.0) * sig);
  const int nmax = spec.m_daf / 2;
  const Vec h = hermite_table(z, 2 * nmax + 2);
  double sum = 0.0, coef = 1.0;  // (-1/4)^n / n!
  for (int n = 0; n <= nmax; ++n) {
    sum += coef * h(2 * n + 2);
    coef *= -0.25 / (n + 1);
  }
  const double pre = -spec.hbar * spec.hbar /
                     (4.0 * spec.mass * sig * sig * sig * std::sqrt(2.0 * units::kPi));
  return pre * std::exp(-x * x / (2.0 * sig * sig)) * sum;
}

Mat daf_kinetic(const Grid1D& g, const DafKineticSpec& spec) {
  spec.validate();
  const int n = g.n;
  Vec row(n);
  for (int d = 0; d < n; ++d) row(d) = g.spacing * daf_kernel(d * g.spacing, spec);
  Mat k(n, n);
  for (int i = 0; i < n; ++i)
    for (int l = 0; l < n; ++l) k(i, l) = row(std::abs(i - l));
  return k;
}

PotentialSurface synthetic_pes(const SyntheticPesParams& p, const Grid1D& g1, const Grid1D& g2) {
  const double x0 = units::angstrom_to_bohr(p.well_angstrom);
  const double tref = units::deg_to_rad(p.torsion_ref_deg);
  if (!(x0 > 0.0) || !(tref > 0.0)) throw DomainError("synthetic_pes: scales must be positive");
  PotentialSurface s;
  s.values.resize(g1.n, g2.n);
  for (int i = 0; i < g1.n; ++i)
    for (int j = 0; j < g2.n; ++j) {
      const double u = g1.points(i) / x0, w = g2.points(j) / tref;
      const double well = (u * u - 1.0) * (u * u - 1.0);
      const double kcal = p.barrier_kcal * well * (1.0 + p.gating * w * w) +
                          p.torsion_kcal * w * w + p.bilinear_kcal * u * w;
      s.values(i, j) = units::kcal_to_hartree(kcal);
    }
  if (!s.values.allFinite()) throw DomainError("synthetic_pes: non-finite surface");
  s.symmetric = is_inversion_symmetric(s.values, 1e-12 * (1.0 + s.values.cwiseAbs().maxCoeff()));
  return s;
}

bool is_inversion_symmetric(const Mat& v, double tol) {
  const auto n1 = v.rows(), n2 = v.cols();
  for (Eigen::Index i = 0; i < n1; ++i)
    for (Eigen::Index j = 0; j < n2; ++j)
      if (std::abs(v(i, j) - v(n1 - 1 - i, n2 - 1 - j)) > tol) return false;
  return true;
}

double hartree_per_unit(const std::string& unit) {
  if (unit == "hartree" || unit == "au" || unit == "Eh") return 1.0;
  if (unit == "kcal/mol" || unit == "kcal") return 1.0 / units::kKcalPerHartree;
  if (unit == "cm-1") return 1.0 / 219474.6313632;
  if (unit == "eV" || unit == "ev") return 1.0 / 27.211386245988;
  if (unit == "THz" || unit == "thz") return 1.0 / units::kThzPerHartree;
  throw ParseError("pes: unknown energy unit '" + unit + "'");
}

PotentialSurface read_pes(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw ParseError("pes: empty input");
  std::istringstream hs(line);
  std::string magic, ver, unit;
  long n1 = 0, n2 = 0;
  int sym = -1;
  if (!(hs >> magic >> ver >> n1 >> n2 >> unit >> sym) || magic != "pes" || ver != "v1" ||
      (sym != 0 && sym != 1))
    throw ParseError("pes: bad header, expected 'pes v1 <n1> <n2> <unit> <0|1>'");
  if (!is_pow2(n1) || !is_pow2(n2))
    throw ParseError("pes: shape " + std::to_string(n1) + "x" + std::to_string(n2) +
                     " is not a power of two");
  const double scale = hartree_per_unit(unit);
  PotentialSurface s;
  s.values.resize(n1, n2);
  s.source_unit = unit;
  for (long i = 0; i < n1; ++i)
    for (long j = 0; j < n2; ++j) {
      double v;
      if (!(in >> v)) throw ParseError("pes: expected " + std::to_string(n1 * n2) + " values");
      s.values(i, j) = v * scale;
    }
  std::string extra;
  if (in >> extra) throw ParseError("pes: trailing data after " + std::to_string(n1 * n2) + " values");
  if (!s.values.allFinite()) throw ParseError("pes: non-finite value");
  if (sym == 1) {
    // symmetry is checked in file units so the 1e-9 tolerance means what the file says
    if (!is_inversion_symmetric(s.values / scale, 1e-9))
      throw ParseError("pes: file claims inversion symmetry but values[i][j] != values[n1-1-i][n2-1-j]");
    s.symmetric = true;
  }
  return s;
}

PotentialSurface load_pes(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ParseError("pes: cannot open '" + path + "'");
  return read_pes(f);
}

void write_pes(std::ostream& out, const PotentialSurface& s) {
  out << "pes v1 " << s.values.rows() << ' ' << s.values.cols() << " hartree "
      << (s.symmetric ? 1 : 0) << '\n';
  out.precision(17);
  for (Eigen::Index i = 0; i < s.values.rows(); ++i) {
    for (Eigen::Index j = 0; j < s.values.cols(); ++j) out << (j ? " " : "") << s.values(i, j);
    out << '\n';
  }
}

NuclearHamiltonian2D assemble_h2d(const Mat& k1, const Mat& k2, const Mat& v) {
  const auto n1 = k1.rows(), n2 = k2.rows();
  if (k1.cols() != n1 || k2.cols() != n2 || v.rows() != n1 || v.cols() != n2)
    throw DomainError("assemble_h2d: dimension mismatch");
  NuclearHamiltonian2D h;
  h.n1 = static_cast<int>(n1);
  h.n2 = static_cast<int>(n2);
  h.matrix = Mat::Zero(n1 * n2, n1 * n2);
  for (Eigen::Index i = 0; i < n1; ++i)
    for (Eigen::Index l = 0; l < n1; ++l)
      for (Eigen::Index j = 0; j < n2; ++j) h.matrix(i * n2 + j, l * n2 + j) += k1(i, l);
  for (Eigen::Index i = 0; i < n1; ++i)
    for (Eigen::Index j = 0; j < n2; ++j)
      for (Eigen::Index m = 0; m < n2; ++m) h.matrix(i * n2 + j, i * n2 + m) += k2(j, m);
  for (Eigen::Index i = 0; i < n1; ++i)
    for (Eigen::Index j = 0; j < n2; ++j) h.matrix(i * n2 + j, i * n2 + j) += v(i, j);
  return h;
}

EnergyLadderExact exact_eigensolve(const Mat& h) {
  if (h.rows() != h.cols()) throw DomainError("exact_eigensolve: matrix not square");
  const double scale = std::max(1.0, h.cwiseAbs().maxCoeff());
  if ((h - h.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale)
    throw DomainError("exact_eigensolve: matrix not symmetric");
  Eigen::SelfAdjointEigenSolver<Mat> es(h);
  if (es.info() != Eigen::Success) throw std::runtime_error("exact_eigensolve: no convergence");
  EnergyLadderExact out;
  out.eigenvalues = es.eigenvalues();
  out.eigenvectors = es.eigenvectors();
  // deterministic signs: largest component of each vector positive
  for (Eigen::Index k = 0; k < out.eigenvectors.cols(); ++k) {
    Eigen::Index imax;
    out.eigenvectors.col(k).cwiseAbs().maxCoeff(&imax);
    if (out.eigenvectors(imax, k) < 0) out.eigenvectors.col(k) *= -1.0;
  }
  return out;
}

TimeTrace classical_propagate(const Mat& h, const CVec& psi0, const SimulationSchedule& sched) {
  sched.validate();
  if (psi0.size() != h.rows()) throw DomainError("classical_propagate: state dimension mismatch");
  if (std::abs(psi0.norm() - 1.0) > 1e-9) throw DomainError("classical_propagate: psi0 not normalized");
  const auto ex = exact_eigensolve(h);
  const Mat& v = ex.eigenvectors;
  const CVec c = v.transpose().cast<cplx>() * psi0;
  const int nt = sched.n_steps();
  TimeTrace tr;
  tr.schedule = sched;
  tr.density.resize(nt + 1, h.rows());
  const double dt = units::fs_to_au(sched.dt_fs);
  for (int k = 0; k <= nt; ++k) {
    CVec ck(c.size());
    for (Eigen::Index m = 0; m < c.size(); ++m)
      ck(m) = c(m) * std::exp(-kI * (ex.eigenvalues(m) * k * dt));
    const CVec psi = v.cast<cplx>() * ck;
    tr.density.row(k) = psi.cwiseAbs2().transpose();
  }
  return tr;
}

}  // namespace qvib
