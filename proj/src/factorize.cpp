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

#include "qvib/factorize.hpp"

#include <algorithm>
#include <cmath>

#include "qvib/errors.hpp"
#include "qvib/units.hpp"

namespace qvib {

namespace {

// make the first non-negligible entry of `a` real-positive; compensate in `b`
void fix_phase(CVec& a, CVec& b) {
  const double big = a.cwiseAbs().maxCoeff();
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    if (std::abs(a(i)) > 1e-8 * big) {
      const cplx ph = a(i) / std::abs(a(i));
      a *= std::conj(ph);
      b *= ph;
      return;
    }
  }
}

// columns: (e_i +/- e_{n-1-i}) / sqrt 2 for i < n/2
Mat parity_basis(int n, int sign) {
  Mat b = Mat::Zero(n, n / 2);
  const double r = 1.0 / std::sqrt(2.0);
  for (int i = 0; i < n / 2; ++i) {
    b(i, i) = r;
    b(n - 1 - i, i) = sign * r;
  }
  return b;
}

}  // namespace

CMat SchmidtWavepacket::dense() const {
  return left * weights.cast<cplx>().asDiagonal() * right.transpose();
}

SchmidtWavepacket schmidt_decompose(const CMat& psi, double tol) {
  if (std::abs(psi.norm() - 1.0) > 1e-9) throw DomainError("schmidt_decompose: state not normalized");
  Eigen::JacobiSVD<CMat> svd(psi, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Vec s = svd.singularValues();
  int rank = static_cast<int>(s.size());
  double tail = 0.0;
  while (rank > 1 && tail + s(rank - 1) * s(rank - 1) <= tol * tol) {
    tail += s(rank - 1) * s(rank - 1);
    --rank;
  }
  SchmidtWavepacket wp;
  wp.rank = rank;
  wp.weights = s.head(rank);
  wp.left = svd.matrixU().leftCols(rank);
  // psi = U S V^H = U S (conj V)^T
  wp.right = svd.matrixV().leftCols(rank).conjugate();
  for (int a = 0; a < rank; ++a) {
    CVec l = wp.left.col(a), r = wp.right.col(a);
    fix_phase(l, r);
    wp.left.col(a) = l;
    wp.right.col(a) = r;
  }
  return wp;
}

ExtractedPotential extract_effective_potential(const CVec& f, double dt_fs) {
  if (!(dt_fs > 0.0)) throw DomainError("extract_effective_potential: dt must be positive");
  const Eigen::Index n = f.size();
  ExtractedPotential out;
  out.log_amp.resize(n);
  out.veff.resize(n);
  double prev = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    const double a = std::abs(f(i));
    if (a <= 1e-14) throw DomainError("extract_effective_potential: zero entry (over-truncated channel)");
    out.log_amp(i) = std::log(a);
    double ph = std::arg(f(i));
    if (i > 0) ph += 2.0 * units::kPi * std::round((prev - ph) / (2.0 * units::kPi));
    out.veff(i) = ph;
    prev = ph;
  }
  const double half = units::fs_to_au(dt_fs) / 2.0;
  out.veff = -out.veff / half;
  return out;
}

CMat potential_half_propagator(const Mat& v, double dt_fs) {
  const double half = units::fs_to_au(dt_fs) / 2.0;
  CMat p(v.rows(), v.cols());
  for (Eigen::Index i = 0; i < v.rows(); ++i)
    for (Eigen::Index j = 0; j < v.cols(); ++j) p(i, j) = std::exp(-kI * (v(i, j) * half));
  return p;
}

CMat PotentialChannelSet::dense() const {
  if (channels.empty()) return CMat();
  CMat m = CMat::Zero(channels[0].f1.size(), channels[0].f2.size());
  for (const auto& c : channels) m += c.f1 * c.f2.transpose();
  return m;
}

PotentialChannelSet factor_potential_propagator(const PotentialSurface& v, double dt_fs, double tol) {
  if (!(dt_fs > 0.0)) throw DomainError("factor_potential_propagator: dt must be positive");
  const CMat p = potential_half_propagator(v.values, dt_fs);
  const int n1 = static_cast<int>(p.rows()), n2 = static_cast<int>(p.cols());

  struct Raw {
    double s;
    int parity;
    CVec f1, f2;
  };
  std::vector<Raw> raw;
  auto take = [&](const CMat& block, const Mat& b1, const Mat& b2, int parity) {
    Eigen::JacobiSVD<CMat> svd(block, Eigen::ComputeThinU | Eigen::ComputeThinV);
    for (Eigen::Index k = 0; k < svd.singularValues().size(); ++k) {
      const double s = svd.singularValues()(k);
      CVec f1 = b1.cast<cplx>() * svd.matrixU().col(k) * std::sqrt(s);
      CVec f2 = b2.cast<cplx>() * svd.matrixV().col(k).conjugate() * std::sqrt(s);
      raw.push_back({s, parity, f1, f2});
    }
  };

  PotentialChannelSet set;
  set.dt_fs = dt_fs;
  set.tol = tol;
  const bool split = v.symmetric && n1 % 2 == 0 && n2 % 2 == 0 &&
                     is_inversion_symmetric(v.values, 0.0);
  if (split) {
    const Mat e1 = parity_basis(n1, +1), o1 = parity_basis(n1, -1);
    const Mat e2 = parity_basis(n2, +1), o2 = parity_basis(n2, -1);
    take(e1.transpose().cast<cplx>() * p * e2.cast<cplx>(), e1, e2, +1);
    take(o1.transpose().cast<cplx>() * p * o2.cast<cplx>(), o1, o2, -1);
    std::stable_sort(raw.begin(), raw.end(), [](const Raw& a, const Raw& b) { return a.s > b.s; });
  } else {
    take(p, Mat::Identity(n1, n1), Mat::Identity(n2, n2), 0);
  }
  set.sector_split = split;

  int keep = static_cast<int>(raw.size());
  double tail = 0.0;
  while (keep > 1 && tail + raw[keep - 1].s * raw[keep - 1].s <= tol * tol) {
    tail += raw[keep - 1].s * raw[keep - 1].s;
    --keep;
  }
  for (int k = 0; k < keep; ++k) {
    PotentialChannel c;
    c.f1 = raw[k].f1;
    c.f2 = raw[k].f2;
    c.singular_value = raw[k].s;
    c.parity = raw[k].parity;
    fix_phase(c.f1, c.f2);
    // weak channels can have nodes; only extract where it is defined
    if (c.f1.cwiseAbs().minCoeff() > 1e-14 && c.f2.cwiseAbs().minCoeff() > 1e-14) {
      c.p1 = extract_effective_potential(c.f1, dt_fs);
      c.p2 = extract_effective_potential(c.f2, dt_fs);
      set.max_log_amp_deviation = std::max(
          {set.max_log_amp_deviation, c.p1.log_amp.cwiseAbs().maxCoeff(), c.p2.log_amp.cwiseAbs().maxCoeff()});
    }
    set.channels.push_back(std::move(c));
  }
  set.reconstruction_error = (set.dense() - p).norm();
  return set;
}

EffectiveHamiltonian build_effective_hamiltonian(const Mat& k, const Vec& v_gamma, const Vec& v_beta, int dim,
                                                 int gamma, int beta) {
  if (k.rows() != k.cols() || v_gamma.size() != k.rows() || v_beta.size() != k.rows())
    throw DomainError("build_effective_hamiltonian: length mismatch");
  EffectiveHamiltonian h;
  h.dim = dim;
  h.gamma = gamma;
  h.beta = beta;
  h.matrix = k;
  h.matrix.diagonal() += 0.5 * (v_gamma + v_beta);
  return h;
}

std::vector<EffectiveHamiltonian> effective_family(const Mat& k, const PotentialChannelSet& ch, int dim) {
  std::vector<EffectiveHamiltonian> out;
  for (int g = 0; g < ch.rank(); ++g)
    for (int b = 0; b < ch.rank(); ++b) {
      const auto& cg = ch.channels[g];
      const auto& cb = ch.channels[b];
      const Vec& vg = dim == 1 ? cg.p1.veff : cg.p2.veff;
      const Vec& vb = dim == 1 ? cb.p1.veff : cb.p2.veff;
      if (vg.size() == 0 || vb.size() == 0) continue;  // channel with nodes
      out.push_back(build_effective_hamiltonian(k, vg, vb, dim, g, b));
    }
  return out;
}

CMat kinetic_propagator(const Mat& k, double dt_fs) { return evolution_operator(k, units::fs_to_au(dt_fs)); }

CMat propagate_mps_step(const SchmidtWavepacket& wp, const PotentialChannelSet& ch, const CMat& kprop1,
                        const CMat& kprop2) {
  if (ch.channels.empty()) throw DomainError("propagate_mps_step: empty channel set");
  const auto n1 = wp.left.rows(), n2 = wp.right.rows();
  if (ch.channels[0].f1.size() != n1 || ch.channels[0].f2.size() != n2 || kprop1.rows() != n1 ||
      kprop2.rows() != n2)
    throw DomainError("propagate_mps_step: dimension mismatch");
  CMat out = CMat::Zero(n1, n2);
  for (int a = 0; a < wp.rank; ++a)
    for (const auto& cb : ch.channels) {
      // first half-step and kinetic step act independently per dimension
      const CVec l = kprop1 * cb.f1.cwiseProduct(wp.left.col(a));
      const CVec r = kprop2 * cb.f2.cwiseProduct(wp.right.col(a));
      for (const auto& cg : ch.channels)
        out += wp.weights(a) * cg.f1.cwiseProduct(l) * cg.f2.cwiseProduct(r).transpose();
    }
  return out / out.norm();
}

CMat dense_trotter_step(const CMat& psi, const Mat& v, const CMat& kprop1, const CMat& kprop2, double dt_fs) {
  const CMat p = potential_half_propagator(v, dt_fs);
  const CMat a = p.cwiseProduct(psi);
  const CMat b = kprop1 * a * kprop2.transpose();
  return p.cwiseProduct(b);
}

}  // namespace qvib
