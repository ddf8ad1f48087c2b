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

#include "qvib/circuit.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <string>

#include <json.hpp>

#include "qvib/errors.hpp"
#include "qvib/units.hpp"

namespace qvib {

using nlohmann::json;

namespace {

constexpr double kPi = units::kPi;

CMat rz_m(double t) {
  CMat m = CMat::Zero(2, 2);
  m(0, 0) = std::exp(-kI * (t / 2));
  m(1, 1) = std::exp(kI * (t / 2));
  return m;
}

CMat ry_m(double t) {
  CMat m(2, 2);
  m << std::cos(t / 2), -std::sin(t / 2), std::sin(t / 2), std::cos(t / 2);
  return m;
}

CMat sx_m() {
  CMat m(2, 2);
  m << cplx(0.5, 0.5), cplx(0.5, -0.5), cplx(0.5, -0.5), cplx(0.5, 0.5);
  return m;
}

CMat h_m() {
  const double r = 1.0 / std::sqrt(2.0);
  CMat m(2, 2);
  m << r, r, r, -r;
  return m;
}

// columns are the magic (Bell-like) basis; local gates become SO(4)
const CMat& magic() {
  static const CMat m = [] {
    const double r = 1.0 / std::sqrt(2.0);
    CMat x(4, 4);
    x << r, kI * r, 0, 0,  //
        0, 0, kI * r, r,   //
        0, 0, kI * r, -r,  //
        r, -kI * r, 0, 0;
    return x;
  }();
  return m;
}

// k = a (x) b with a, b in SU(2)
void kron_factor(const CMat& k, CMat& a, CMat& b) {
  int bi = 0, bj = 0;
  double best = -1.0;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) {
      const double nrm = k.block(2 * i, 2 * j, 2, 2).norm();
      if (nrm > best) {
        best = nrm;
        bi = i;
        bj = j;
      }
    }
  b = k.block(2 * bi, 2 * bj, 2, 2);
  b /= std::sqrt(b.determinant());
  a.resize(2, 2);
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) a(i, j) = (b.adjoint() * k.block(2 * i, 2 * j, 2, 2)).trace() / 2.0;
}

void check_unitary(const CMat& u, Eigen::Index n, const char* who) {
  if (u.rows() != n || u.cols() != n) throw DomainError(std::string(who) + ": wrong matrix size");
  if (!u.allFinite() || !is_unitary(u, 1e-10)) throw DomainError(std::string(who) + ": input not unitary");
}

const char* kind_name(GateKind k) {
  switch (k) {
    case GateKind::Rz: return "rz";
    case GateKind::SqrtX: return "sx";
    case GateKind::H: return "h";
    case GateKind::CNOT: return "cx";
  }
  return "?";
}

}  // namespace

int Circuit::cnot_count() const {
  return static_cast<int>(std::count_if(gates.begin(), gates.end(), [](const Gate& g) { return g.kind == GateKind::CNOT; }));
}

void Circuit::append(const Circuit& o, const std::vector<int>& map) {
  for (Gate g : o.gates) {
    g.q0 = map.at(g.q0);
    if (g.q1 >= 0) g.q1 = map.at(g.q1);
    gates.push_back(g);
  }
}

void Circuit::append(const Circuit& o) { gates.insert(gates.end(), o.gates.begin(), o.gates.end()); }

CMat gate_matrix(const Gate& g) {
  switch (g.kind) {
    case GateKind::Rz: return rz_m(g.angle);
    case GateKind::SqrtX: return sx_m();
    case GateKind::H: return h_m();
    case GateKind::CNOT: {
      CMat m = CMat::Zero(4, 4);
      m(0, 0) = m(1, 1) = m(2, 3) = m(3, 2) = 1.0;
      return m;
    }
  }
  return CMat();
}

void apply_gate(CVec& psi, int width, const Gate& g) {
  const Eigen::Index dim = Eigen::Index(1) << width;
  if (psi.size() != dim) throw DomainError("apply_gate: state size mismatch");
  if (g.q0 < 0 || g.q0 >= width || (g.kind == GateKind::CNOT && (g.q1 < 0 || g.q1 >= width || g.q1 == g.q0)))
    throw DomainError("apply_gate: qubit index out of range");
  if (g.kind == GateKind::CNOT) {
    const Eigen::Index cm = Eigen::Index(1) << (width - 1 - g.q0);
    const Eigen::Index tm = Eigen::Index(1) << (width - 1 - g.q1);
    for (Eigen::Index i = 0; i < dim; ++i)
      if ((i & cm) && !(i & tm)) std::swap(psi(i), psi(i | tm));
    return;
  }
  const CMat m = gate_matrix(g);
  const Eigen::Index bit = Eigen::Index(1) << (width - 1 - g.q0);
  for (Eigen::Index i = 0; i < dim; ++i) {
    if (i & bit) continue;
    const cplx a0 = psi(i), a1 = psi(i | bit);
    psi(i) = m(0, 0) * a0 + m(0, 1) * a1;
    psi(i | bit) = m(1, 0) * a0 + m(1, 1) * a1;
  }
}

CMat circuit_unitary(const Circuit& c) {
  const Eigen::Index dim = Eigen::Index(1) << c.width;
  CMat u = CMat::Identity(dim, dim);
  for (Eigen::Index k = 0; k < dim; ++k) {
    CVec col = u.col(k);
    for (const auto& g : c.gates) apply_gate(col, c.width, g);
    u.col(k) = col;
  }
  return u;
}

Circuit compile_1q(const CMat& u) {
  const CMat v = u / std::sqrt(u.determinant());
  const cplx a = v(0, 0), b = v(1, 0);
  const double beta = 2.0 * std::atan2(std::abs(b), std::abs(a));
  const double sum = std::abs(a) > 1e-14 ? -2.0 * std::arg(a) : 0.0;   // alpha + gamma
  const double diff = std::abs(b) > 1e-14 ? 2.0 * std::arg(b) : 0.0;   // alpha - gamma
  const double alpha = 0.5 * (sum + diff), gamma = 0.5 * (sum - diff);
  Circuit c;
  c.width = 1;
  c.rz(0, gamma);
  c.sx(0);
  c.rz(0, beta + kPi);
  c.sx(0);
  c.rz(0, alpha + kPi);
  return c;
}

KakParams kak_decompose(const CMat& u_in) {
  check_unitary(u_in, 4, "kak_decompose");
  const cplx q = std::pow(u_in.determinant(), 0.25);
  const CMat u = u_in / q;
  const CMat& m = magic();
  const CMat up = m.adjoint() * u * m;
  const CMat w = up.transpose() * up;
  const Mat re = w.real(), im = w.imag();

  // real and imaginary parts commute; a generic mix diagonalizes both
  Mat p;
  double best = 1e300;
  for (double r : {0.5857864376, 1.0, 2.7182818284, -0.3183098862, 0.1, 7.3890560989, -1.6180339887}) {
    Eigen::SelfAdjointEigenSolver<Mat> es(re + r * im);
    const Mat cand = es.eigenvectors();
    CMat dw = cand.transpose().cast<cplx>() * w * cand.cast<cplx>();
    dw.diagonal().setZero();
    const double off = dw.norm();
    if (off < best) {
      best = off;
      p = cand;
    }
    if (off < 1e-13) break;
  }
  if (p.determinant() < 0) p.col(0) *= -1.0;

  const CVec lam = (p.transpose().cast<cplx>() * w * p.cast<cplx>()).diagonal();
  CVec d(4);
  for (int k = 0; k < 4; ++k) d(k) = std::sqrt(lam(k));
  CMat o1c = up * p.cast<cplx>();
  for (int k = 0; k < 4; ++k) o1c.col(k) /= d(k);
  Mat o1 = o1c.real();
  if (o1.determinant() < 0) {
    o1.col(0) *= -1.0;
    d(0) = -d(0);
  }

  KakParams out;
  kron_factor(m * o1.cast<cplx>() * m.adjoint(), out.k1a, out.k1b);
  kron_factor(m * p.transpose().cast<cplx>() * m.adjoint(), out.k2a, out.k2b);

  // arg d_k = phi + a sx_k + b sy_k + c sz_k; the design matrix is orthogonal (x4)
  static const int sx[4] = {1, -1, 1, -1}, sy[4] = {-1, 1, 1, -1}, sz[4] = {1, 1, -1, -1};
  double th[4];
  for (int k = 0; k < 4; ++k) th[k] = std::arg(d(k));
  double phi = 0;
  for (int k = 0; k < 4; ++k) {
    phi += th[k] / 4;
    out.a += sx[k] * th[k] / 4;
    out.b += sy[k] * th[k] / 4;
    out.c += sz[k] * th[k] / 4;
  }
  out.phase = phi + std::arg(q);
  return out;
}

Circuit kak_compile(const CMat& u) {
  const KakParams k = kak_decompose(u);
  Circuit c;
  c.width = 2;
  // core: Rz(-pi/2)_1 CX(1,0) [Rz(pi/2-2c)_0 Ry(2a-pi/2)_1] CX(0,1) Ry(pi/2-2b)_1 CX(1,0) Rz(pi/2)_0
  c.append(compile_1q(k.k2a), {0});
  c.append(compile_1q(rz_m(-kPi / 2) * k.k2b), {1});
  c.cx(1, 0);
  c.append(compile_1q(rz_m(kPi / 2 - 2 * k.c)), {0});
  c.append(compile_1q(ry_m(2 * k.a - kPi / 2)), {1});
  c.cx(0, 1);
  c.append(compile_1q(ry_m(kPi / 2 - 2 * k.b)), {1});
  c.cx(1, 0);
  c.append(compile_1q(k.k1a * rz_m(kPi / 2)), {0});
  c.append(compile_1q(k.k1b), {1});
  c.target_checksum = matrix_checksum(u);
  return c;
}

BlockUnitaryFactorization svd_block_factor(const CMat& u0, const CMat& u1) {
  check_unitary(u0, 4, "svd_block_factor");
  check_unitary(u1, 4, "svd_block_factor");
  // U0 U1^dag = U D^2 U^dag; Schur vectors of a normal matrix are orthonormal
  // eigenvectors, and the Schur routine is deterministic inside degenerate clusters.
  Eigen::ComplexSchur<CMat> schur(u0 * u1.adjoint());
  const CMat& uu = schur.matrixU();
  const CVec d2 = schur.matrixT().diagonal();
  CVec d(4);
  for (int k = 0; k < 4; ++k) d(k) = std::polar(1.0, 0.5 * std::arg(d2(k)));  // principal branch
  BlockUnitaryFactorization f;
  f.u = uu;
  f.d = d.asDiagonal();
  f.v = d.cwiseInverse().asDiagonal() * uu.adjoint() * u0;
  const double e0 = (f.u * f.d * f.v - u0).norm(), e1 = (f.u * f.d.adjoint() * f.v - u1).norm();
  if (e0 > 1e-9 || e1 > 1e-9)
    throw std::runtime_error("svd_block_factor: reconstruction error " + std::to_string(std::max(e0, e1)));
  return f;
}

Circuit compile_diagonal(const CMat& d) {
  if (d.rows() != 4 || d.cols() != 4) throw DomainError("compile_diagonal: expected 4x4 diagonal");
  CMat off = d;
  off.diagonal().setZero();
  if (off.norm() > 1e-10) throw DomainError("compile_diagonal: matrix not diagonal");
  double th[4];
  for (int k = 0; k < 4; ++k) {
    if (std::abs(std::abs(d(k, k)) - 1.0) > 1e-10) throw DomainError("compile_diagonal: entry not unit modulus");
    th[k] = -2.0 * std::arg(d(k, k));  // Rz(th) on the selector gives d_k / conj(d_k)
  }
  // multiplexed Rz: effective angle t0 + (-1)^x1 t1 + (-1)^(x1^x2) t2 + (-1)^x2 t3
  const double t0 = (th[0] + th[1] + th[2] + th[3]) / 4, t1 = (th[0] + th[1] - th[2] - th[3]) / 4;
  const double t2 = (th[0] - th[1] - th[2] + th[3]) / 4, t3 = (th[0] - th[1] + th[2] - th[3]) / 4;
  Circuit c;
  c.width = 3;
  c.rz(0, t0);
  c.cx(1, 0);
  c.rz(0, t1);
  c.cx(2, 0);
  c.rz(0, t2);
  c.cx(1, 0);
  c.rz(0, t3);
  c.cx(2, 0);
  return c;
}

Circuit compile_block_diagonal(const CMat& u0, const CMat& u1) {
  const auto f = svd_block_factor(u0, u1);
  Circuit c;
  c.width = 3;
  c.append(kak_compile(f.v), {1, 2});
  c.append(compile_diagonal(f.d));
  c.append(kak_compile(f.u), {1, 2});
  CMat full = CMat::Zero(8, 8);
  full.topLeftCorner(4, 4) = u0;
  full.bottomRightCorner(4, 4) = u1;
  c.target_checksum = matrix_checksum(full);
  return c;
}

Circuit append_grid_basis_map(const Circuit& c) {
  if (c.width != 3) throw DomainError("append_grid_basis_map: circuit width must be 3");
  Circuit out = c;
  out.h(0);
  return out;
}

Circuit prepare_delta_state(int grid_index, PrepBasis basis, int width) {
  if (width < 1) throw DomainError("prepare_delta_state: width must be positive");
  const int n = 1 << width;
  if (grid_index < 0 || grid_index >= n) throw DomainError("prepare_delta_state: grid index out of range");
  Circuit c;
  c.width = width;
  auto x = [&](int q) {
    c.sx(q);
    c.sx(q);
  };
  switch (basis) {
    case PrepBasis::Computational:
      for (int q = 0; q < width; ++q)
        if (grid_index >> (width - 1 - q) & 1) x(q);
      break;
    case PrepBasis::Shuffled: {
      // x^g = (|0b> + |1b>)/sqrt2 with b = n-1-g for the upper half, (|0b> - |1b>) ... with b = g below
      const bool upper = grid_index >= n / 2;
      const int b = upper ? n - 1 - grid_index : grid_index;
      for (int q = 1; q < width; ++q)
        if (b >> (width - 1 - q) & 1) x(q);
      if (!upper) x(0);
      c.h(0);
      break;
    }
    case PrepBasis::Transformed:
      if (width > 1)
        throw DomainError("prepare_delta_state: a grid delta in the transformed basis pairs x^g with its mirror "
                          "and needs entangling gates; use the shuffled basis");
      if (grid_index == 0) x(0);
      c.h(0);
      break;
  }
  return c;
}

void write_circuit_jsonl(std::ostream& out, const Circuit& c) {
  json hdr = {{"format", "qvib-circuit"}, {"width", c.width}, {"checksum", c.target_checksum},
              {"time_index", c.time_index}, {"gates", c.gates.size()}, {"cnots", c.cnot_count()}};
  out << hdr.dump() << '\n';
  for (const auto& g : c.gates) {
    json j = {{"kind", kind_name(g.kind)}};
    j["qubits"] = g.kind == GateKind::CNOT ? json::array({g.q0, g.q1}) : json::array({g.q0});
    if (g.kind == GateKind::Rz) j["angle"] = g.angle;
    out << j.dump() << '\n';
  }
}

Circuit read_circuit_jsonl(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw ParseError("circuit: empty stream");
  Circuit c;
  try {
    const json hdr = json::parse(line);
    if (hdr.value("format", "") != "qvib-circuit") throw ParseError("circuit: bad header");
    c.width = hdr.at("width").get<int>();
    c.target_checksum = hdr.value("checksum", "");
    c.time_index = hdr.value("time_index", -1);
    const auto ng = hdr.at("gates").get<std::size_t>();
    for (std::size_t k = 0; k < ng; ++k) {
      if (!std::getline(in, line)) throw ParseError("circuit: truncated gate list");
      const json j = json::parse(line);
      const auto kind = j.at("kind").get<std::string>();
      const auto qs = j.at("qubits").get<std::vector<int>>();
      Gate g;
      if (kind == "rz") {
        g.kind = GateKind::Rz;
        g.angle = j.at("angle").get<double>();
      } else if (kind == "sx") {
        g.kind = GateKind::SqrtX;
      } else if (kind == "h") {
        g.kind = GateKind::H;
      } else if (kind == "cx") {
        g.kind = GateKind::CNOT;
      } else {
        throw ParseError("circuit: unknown gate '" + kind + "'");
      }
      if (qs.size() != (g.kind == GateKind::CNOT ? 2u : 1u)) throw ParseError("circuit: wrong qubit count");
      g.q0 = qs[0];
      if (g.kind == GateKind::CNOT) g.q1 = qs[1];
      c.gates.push_back(g);
    }
  } catch (const json::exception& e) {
    throw ParseError(std::string("circuit: ") + e.what());
  }
  return c;
}

}  // namespace qvib
