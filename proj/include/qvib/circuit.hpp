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

#include <iosfwd>
#include <string>
#include <vector>

#include "qvib/linalg.hpp"

namespace qvib {

enum class GateKind { Rz, SqrtX, H, CNOT };

struct Gate {
  GateKind kind = GateKind::Rz;
  int q0 = 0;       // target for 1q gates, control for CNOT
  int q1 = -1;      // CNOT target
  double angle = 0.0;

  bool operator==(const Gate&) const = default;
};

// Qubit 0 is the most significant bit of a basis index.
struct Circuit {
  int width = 0;
  std::vector<Gate> gates;
  std::string target_checksum;
  int time_index = -1;

  int cnot_count() const;
  void rz(int q, double theta) { gates.push_back({GateKind::Rz, q, -1, theta}); }
  void sx(int q) { gates.push_back({GateKind::SqrtX, q, -1, 0.0}); }
  void h(int q) { gates.push_back({GateKind::H, q, -1, 0.0}); }
  void cx(int c, int t) { gates.push_back({GateKind::CNOT, c, t, 0.0}); }
  // gates of `o` with qubit i relabelled to map[i]
  void append(const Circuit& o, const std::vector<int>& map);
  void append(const Circuit& o);
};

// In-place application on a 2^width statevector.
void apply_gate(CVec& psi, int width, const Gate& g);

CMat gate_matrix(const Gate& g);  // 2x2 for 1q, 4x4 for CNOT (control = MSB)
// Dense reference unitary of a circuit.
CMat circuit_unitary(const Circuit& c);

// Rz(a+pi) SX Rz(b+pi) SX Rz(c) layout, equal to u up to phase.
Circuit compile_1q(const CMat& u);

struct KakParams {
  double a = 0, b = 0, c = 0;  // exp(i(a XX + b YY + c ZZ))
  CMat k1a, k1b;               // after the core (qubit 0, qubit 1)
  CMat k2a, k2b;               // before the core
  double phase = 0.0;
};

// u = e^{i phase} (k1a x k1b) Can(a,b,c) (k2a x k2b)
KakParams kak_decompose(const CMat& u);

// Fixed layout: local layer, 3-CNOT core, local layer.
Circuit kak_compile(const CMat& u);

struct BlockUnitaryFactorization {
  CMat u, d, v;  // U0 = U D V, U1 = U D^dag V
};

BlockUnitaryFactorization svd_block_factor(const CMat& u0, const CMat& u1);

// diag(D, D^dag) on three qubits: 4 CNOTs, 4 Rz on the selector qubit 0.
Circuit compile_diagonal(const CMat& d);

// diag(U0, U1), selector qubit 0; at most 10 CNOTs.
Circuit compile_block_diagonal(const CMat& u0, const CMat& u1);

// Hadamard on the selector so measurement outcomes map one-to-one to grid points.
Circuit append_grid_basis_map(const Circuit& c);

enum class PrepBasis { Computational, Shuffled, Transformed };

// Single-qubit-only preparation of a delta state at grid_index.
Circuit prepare_delta_state(int grid_index, PrepBasis basis, int width);

// JSON lines: header then one gate per line.
void write_circuit_jsonl(std::ostream& out, const Circuit& c);
Circuit read_circuit_jsonl(std::istream& in);

}  // namespace qvib
