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
#include <functional>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "qvib/circuit.hpp"
#include "qvib/linalg.hpp"

namespace qvib {

struct Statevector {
  CVec amp;
  int width = 0;
  Vec probabilities() const { return amp.cwiseAbs2(); }
};

inline constexpr int kMaxStatevectorWidth = 12;
inline constexpr int kMaxDensityWidth = 6;

// Runs the gates on |0...0>, or on `init` when given.
Statevector simulate(const Circuit& c, const CVec* init = nullptr);

struct ShotHistogram {
  std::vector<long> counts;
  long shots = 0;
};

// Multinomial draw; the same (probabilities, shots, seed) always gives the same counts.
ShotHistogram sample(const Vec& probabilities, long shots, std::uint64_t seed);
ShotHistogram sample(const Statevector& s, long shots, std::uint64_t seed);

struct NoiseModel {
  double p = 0.0;  // two-qubit depolarizing probability after each CNOT
  void validate() const;
};

// rho -> (1-p) rho + p Tr_pair(rho) (x) I/4 on qubits (a, b).
void depolarize_pair(CMat& rho, int width, int a, int b, double p);

// Density-matrix path; returns measurement probabilities.
Vec apply_noise(const Circuit& c, const NoiseModel& m);
CMat density_matrix_run(const Circuit& c, const NoiseModel& m);

struct JobSpec {
  std::string hamiltonian;  // e.g. "x1"
  std::string block;        // upper | lower | full
  int gamma = 0;
  int beta = 0;
  std::string initial_state;
  int time_index = 0;
  long shots = 1000;

  std::string key() const;
};

struct ExecOptions {
  int workers = 1;
  std::uint64_t global_seed = 0;
  bool statevector = false;  // exact probabilities, no sampling
  NoiseModel noise;
  // test hook: return true to make the given attempt of a job crash
  std::function<bool(const JobSpec&, int attempt)> fault;
};

struct JobResult {
  std::string key;
  std::string status = "ok";  // ok | failed
  std::string error;
  std::string mode;           // statevector | sampled | density
  std::vector<long> counts;
  Vec probabilities;
  long shots = 0;
  std::uint64_t seed = 0;
  int attempts = 0;
  double wall_ms = 0.0;

  // grid-independent outcome distribution (counts normalized, or exact probabilities)
  Vec distribution() const;
};

std::uint64_t job_seed(std::uint64_t global_seed, const std::string& key);

// Runs one job; throws on simulator errors.
JobResult execute_job(const JobSpec& job, const Circuit& circuit, const ExecOptions& opt);

using CircuitProvider = std::function<Circuit(const JobSpec&)>;

// Every job exactly once on a bounded pool; merged by key, so the result is
// independent of worker count and completion order. A crashing job is retried
// once, then reported failed.
std::map<std::string, JobResult> run_schedule(const std::vector<JobSpec>& jobs, const CircuitProvider& circuits,
                                              const ExecOptions& opt);

nlohmann::json result_to_json(const JobResult& r, bool with_wall_time = true);
JobResult result_from_json(const nlohmann::json& j);
// Key-sorted document without timing fields; byte-stable across runs.
std::string canonical_results(const std::map<std::string, JobResult>& results);

// Directory store: <dir>/<key>.json per job plus <dir>/index.json listing keys.
// "index" and "options" are reserved names.
class ResultsStore {
 public:
  explicit ResultsStore(std::string dir);
  bool contains(const std::string& key) const;
  void put(const JobResult& r);  // timing is not persisted, so files are reproducible
  JobResult get(const std::string& key) const;
  std::vector<std::string> keys() const;
  void write_index() const;
  const std::string& dir() const { return dir_; }

 private:
  std::string path_for(const std::string& key) const;
  std::string dir_;
};

}  // namespace qvib
