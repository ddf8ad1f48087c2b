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

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "qvib/grid.hpp"
#include "qvib/trace.hpp"

namespace qvib {

// One row of the initial-state table: 1-based grid labels for a (mode, run).
struct StateRow {
  std::string mode;  // x1 | x2
  std::string run;   // upper | lower | full
  std::vector<int> grid_labels;
};

struct ModeSpec {
  std::string name;
  int points = 8;
  double lo = 0.0, hi = 0.0;  // angstrom for x1, degrees for x2
  double mass_amu = 1.0;      // amu (x2: amu bohr^2)
  SimulationSchedule block;
  SimulationSchedule full;
};

struct PipelineConfig {
  std::string outdir = "qvib_out";
  ModeSpec x1, x2;
  int daf_m = 20;
  double daf_sigma_ratio = 1.5;
  std::string pes_file;  // empty = synthetic
  SyntheticPesParams pes;
  double channel_dt_fs = 0.25;
  double channel_tol = 1e-12;
  std::vector<StateRow> states;
  long shots = 1000;
  double noise = 0.0;
  std::uint64_t seed = 1;
  int workers = 1;
  bool statevector = false;
  double peak_floor = 0.02;
  int mae_levels = 64;

  static PipelineConfig defaults();
  const ModeSpec& mode(const std::string& name) const;
  void validate() const;
};

// `key = value` lines under `[section]` headers; '#' starts a comment.
// Values: numbers, true/false, "strings", [int, int, ...].
PipelineConfig parse_config(std::istream& in, const std::string& origin = "<config>");
PipelineConfig load_config(const std::string& path);
std::string config_to_toml(const PipelineConfig& c);

}  // namespace qvib
