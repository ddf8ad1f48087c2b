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

#include "qvib/linalg.hpp"

namespace qvib {

// Uniform sampling schedule. Times are in fs, frequencies in THz.
struct SimulationSchedule {
  double dt_fs = 1.0;
  double total_fs = 1.0;

  int n_steps() const;
  double d_omega_thz() const { return 1000.0 / (2.0 * total_fs); }
  double omega_max_thz() const { return 1000.0 / (2.0 * dt_fs); }
  // spacing of the zero-padded DFT bins actually produced
  double bin_width_thz() const { return 1000.0 / (2.0 * n_steps() * dt_fs); }
  void validate() const;
};

// Grid densities rho(x, x; k dt), rows = time index 0..n_steps, cols = grid point.
struct TimeTrace {
  Mat density;
  SimulationSchedule schedule;
  std::string label;

  int n_times() const { return static_cast<int>(density.rows()); }
  int n_points() const { return static_cast<int>(density.cols()); }
};

}  // namespace qvib
