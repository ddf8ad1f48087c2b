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
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "qvib/blocks.hpp"
#include "qvib/circuit.hpp"
#include "qvib/config.hpp"
#include "qvib/factorize.hpp"
#include "qvib/grid.hpp"
#include "qvib/qsim.hpp"
#include "qvib/spectral.hpp"
#include "qvib/trace.hpp"

namespace qvib {

// One vibrational mode reduced to its dominant effective 1-D Hamiltonian.
struct ModeModel {
  std::string name;
  Grid1D grid;
  Mat kinetic;
  Mat h;                    // grid basis, channel pair (0, 0)
  BlockDecomposition dec;   // transformed basis: upper/lower blocks for the 2-qubit runs
  Mat shuffled_h;           // S^T h S, block diagonal in the shuffled basis
  SimulationSchedule block, full;
};

struct Model {
  PotentialSurface pes;
  NuclearHamiltonian2D h2d;
  EnergyLadderExact exact;
  PotentialChannelSet channels;
  std::vector<EffectiveHamiltonian> family1, family2;
  ModeModel x1, x2;

  const ModeModel& mode(const std::string& name) const;
};

Model build_model(const PipelineConfig& cfg);

// Evolution circuits for one (mode, run), one per time index 0..N_t.
// Block runs compile exp(-i B t) with KAK on two qubits; full runs compile the
// shuffled-basis block pair and end with the grid-basis Hadamard.
std::vector<Circuit> compile_run(const ModeModel& m, const std::string& run);

std::vector<JobSpec> schedule_jobs(const PipelineConfig& cfg);

// prep(initial state) followed by the stored evolution circuit
Circuit job_circuit(const ModeModel& m, const JobSpec& job, const Circuit& evolution);

// keyed by "<mode>_<run>"
using CircuitBank = std::map<std::string, std::vector<Circuit>>;
CircuitBank compile_all(const Model& model);

std::map<std::string, JobResult> execute_all(const PipelineConfig& cfg, const Model& model, const CircuitBank& bank,
                                             const ExecOptions& opt);

// Per-point densities over time for one initial state.
TimeTrace quantum_trace(const PipelineConfig& cfg, const Model& model, const std::string& mode, const std::string& run,
                        int grid_label, const std::map<std::string, JobResult>& results);
TimeTrace classical_trace(const Model& model, const std::string& mode, const std::string& run, int grid_label);

struct TraceAnalysis {
  std::string mode, run;
  int grid_label = 0;
  TimeTrace quantum;
  PowerSpectrum spectrum;
  double wavepacket_error = 0.0;
};

struct RunAnalysis {
  std::string mode, run;
  PowerSpectrum cumulative;
  std::vector<Peak> peaks;
  double bin_width_thz = 0.0;
  double max_peak_gap_dev_thz = 0.0;  // detected peak to nearest exact gap (blocks only)
};

struct Analysis {
  std::vector<TraceAnalysis> traces;
  std::vector<RunAnalysis> runs;
  std::map<std::string, EnergyLadder> ladders;  // per mode
  std::map<std::string, double> mode_mae_kcal;
  Vec combined_thz;
  double mae_kcal = 0.0;
  double max_wavepacket_error = 0.0;

  const RunAnalysis& run(const std::string& mode, const std::string& run) const;
};

Analysis analyze(const PipelineConfig& cfg, const Model& model, const std::map<std::string, JobResult>& results);

// ---- staged CLI front end; every stage writes under cfg.outdir ----
// Each returns a one-line summary. Missing prior artifacts raise IncompleteError.
std::string cmd_build(const PipelineConfig& cfg);
std::string cmd_factorize(const PipelineConfig& cfg);
std::string cmd_compile(const PipelineConfig& cfg);
std::string cmd_run(const PipelineConfig& cfg, const ExecOptions& opt);
std::string cmd_analyze(const PipelineConfig& cfg);
std::string cmd_report(const PipelineConfig& cfg);

nlohmann::json matrix_to_json(const Mat& m);
Mat matrix_from_json(const nlohmann::json& j);

}  // namespace qvib
