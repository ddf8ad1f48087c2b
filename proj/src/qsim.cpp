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

#include "qvib/qsim.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <random>
#include <thread>

#include "qvib/errors.hpp"

namespace qvib {

namespace fs = std::filesystem;
using nlohmann::json;

Statevector simulate(const Circuit& c, const CVec* init) {
  if (c.width < 1 || c.width > kMaxStatevectorWidth) throw DomainError("simulate: width over limit");
  const Eigen::Index dim = Eigen::Index(1) << c.width;
  Statevector s;
  s.width = c.width;
  if (init) {
    if (init->size() != dim) throw DomainError("simulate: initial state size mismatch");
    s.amp = *init;
  } else {
    s.amp = CVec::Zero(dim);
    s.amp(0) = 1.0;
  }
  for (const auto& g : c.gates) apply_gate(s.amp, c.width, g);
  return s;
}

ShotHistogram sample(const Vec& probabilities, long shots, std::uint64_t seed) {
  if (shots < 1) throw DomainError("sample: shots must be >= 1");
  const Eigen::Index n = probabilities.size();
  std::vector<double> cdf(n);
  double acc = 0.0;
  for (Eigen::Index k = 0; k < n; ++k) {
    acc += std::max(0.0, probabilities(k));
    cdf[k] = acc;
  }
  // 53-bit uniforms straight from the engine; std distributions are not
  // specified bit-for-bit across standard libraries
  std::mt19937_64 eng(seed);
  ShotHistogram h;
  h.counts.assign(n, 0);
  h.shots = shots;
  for (long s = 0; s < shots; ++s) {
    const double u = static_cast<double>(eng() >> 11) * 0x1.0p-53 * acc;
    auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
    if (it == cdf.end()) --it;
    ++h.counts[it - cdf.begin()];
  }
  return h;
}

ShotHistogram sample(const Statevector& s, long shots, std::uint64_t seed) {
  return sample(s.probabilities(), shots, seed);
}

void NoiseModel::validate() const {
  if (!(p >= 0.0 && p <= 1.0)) throw DomainError("noise: p must lie in [0, 1]");
}

void depolarize_pair(CMat& rho, int width, int a, int b, double p) {
  if (p == 0.0) return;
  const Eigen::Index dim = rho.rows();
  const Eigen::Index ma = Eigen::Index(1) << (width - 1 - a), mb = Eigen::Index(1) << (width - 1 - b);
  const Eigen::Index pair = ma | mb;
  // reduced state on the other qubits, embedded with I/4 on the pair
  CMat out = (1.0 - p) * rho;
  for (Eigen::Index i = 0; i < dim; ++i) {
    if (i & pair) continue;
    for (Eigen::Index j = 0; j < dim; ++j) {
      if (j & pair) continue;
      const cplx tr = rho(i, j) + rho(i | mb, j | mb) + rho(i | ma, j | ma) + rho(i | pair, j | pair);
      const cplx v = p * tr / 4.0;
      out(i, j) += v;
      out(i | mb, j | mb) += v;
      out(i | ma, j | ma) += v;
      out(i | pair, j | pair) += v;
    }
  }
  rho = std::move(out);
}

CMat density_matrix_run(const Circuit& c, const NoiseModel& m) {
  m.validate();
  if (c.width < 1 || c.width > kMaxDensityWidth) throw DomainError("apply_noise: width over density-matrix limit");
  const Eigen::Index dim = Eigen::Index(1) << c.width;
  CMat rho = CMat::Zero(dim, dim);
  rho(0, 0) = 1.0;
  for (const auto& g : c.gates) {
    // rho -> U rho U^dag: U on columns, then on columns of the adjoint
    for (Eigen::Index k = 0; k < dim; ++k) {
      CVec col = rho.col(k);
      apply_gate(col, c.width, g);
      rho.col(k) = col;
    }
    CMat t = rho.adjoint();
    for (Eigen::Index k = 0; k < dim; ++k) {
      CVec col = t.col(k);
      apply_gate(col, c.width, g);
      t.col(k) = col;
    }
    rho = t.adjoint();
    if (g.kind == GateKind::CNOT) depolarize_pair(rho, c.width, g.q0, g.q1, m.p);
  }
  return rho;
}

Vec apply_noise(const Circuit& c, const NoiseModel& m) { return density_matrix_run(c, m).diagonal().real(); }

std::string JobSpec::key() const {
  char t[16];
  std::snprintf(t, sizeof t, "%04d", time_index);
  return hamiltonian + "_" + block + "_c" + std::to_string(gamma) + "-" + std::to_string(beta) + "_" +
         initial_state + "_t" + t;
}

Vec JobResult::distribution() const {
  if (mode != "sampled") return probabilities;  // statevector or density: exact
  Vec d(counts.size());
  for (std::size_t k = 0; k < counts.size(); ++k) d(k) = static_cast<double>(counts[k]) / std::max(1L, shots);
  return d;
}

std::uint64_t job_seed(std::uint64_t global_seed, const std::string& key) {
  return mix64(global_seed ^ fnv1a(key));
}

JobResult execute_job(const JobSpec& job, const Circuit& circuit, const ExecOptions& opt) {
  JobResult r;
  r.key = job.key();
  r.seed = job_seed(opt.global_seed, r.key);
  if (opt.noise.p > 0.0) {
    const Vec p = apply_noise(circuit, opt.noise);
    if (opt.statevector) {
      r.mode = "density";
      r.probabilities = p;
    } else {
      r.mode = "sampled";
      const auto h = sample(p, job.shots, r.seed);
      r.counts = h.counts;
      r.shots = h.shots;
    }
    return r;
  }
  const Statevector s = simulate(circuit);
  if (opt.statevector) {
    r.mode = "statevector";
    r.probabilities = s.probabilities();
  } else {
    r.mode = "sampled";
    const auto h = sample(s, job.shots, r.seed);
    r.counts = h.counts;
    r.shots = h.shots;
  }
  return r;
}

std::map<std::string, JobResult> run_schedule(const std::vector<JobSpec>& jobs, const CircuitProvider& circuits,
                                              const ExecOptions& opt) {
  std::vector<std::string> keys;
  keys.reserve(jobs.size());
  for (const auto& j : jobs) keys.push_back(j.key());
  {
    auto sorted = keys;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
      throw DomainError("run_schedule: duplicate job keys");
  }
  std::vector<JobResult> slots(jobs.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&]() {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= jobs.size()) return;
      const JobSpec& job = jobs[i];
      JobResult res;
      std::string err;
      int attempt = 0;
      for (; attempt < 2; ++attempt) {
        const auto t0 = std::chrono::steady_clock::now();
        try {
          if (opt.fault && opt.fault(job, attempt)) throw std::runtime_error("injected worker crash");
          res = execute_job(job, circuits(job), opt);
          res.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
          err.clear();
          break;
        } catch (const std::exception& e) {
          err = e.what();
        }
      }
      if (!err.empty()) {
        res = JobResult{};
        res.key = keys[i];
        res.status = "failed";
        res.error = err;
        res.seed = job_seed(opt.global_seed, keys[i]);
        attempt = 2;
      } else {
        ++attempt;
      }
      res.attempts = attempt;
      slots[i] = std::move(res);
    }
  };
  const int nw = std::max(1, std::min<int>(opt.workers, static_cast<int>(std::max<std::size_t>(1, jobs.size()))));
  if (nw == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < nw; ++w) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  std::map<std::string, JobResult> out;
  for (auto& r : slots) out.emplace(r.key, std::move(r));
  return out;
}

json result_to_json(const JobResult& r, bool with_wall_time) {
  json j;
  j["key"] = r.key;
  j["status"] = r.status;
  j["mode"] = r.mode;
  j["shots"] = r.shots;
  j["seed"] = r.seed;
  j["attempts"] = r.attempts;
  if (!r.error.empty()) j["error"] = r.error;
  if (!r.counts.empty()) j["histogram"] = r.counts;
  if (r.probabilities.size()) j["probabilities"] = std::vector<double>(r.probabilities.begin(), r.probabilities.end());
  if (with_wall_time) j["wall_ms"] = r.wall_ms;
  return j;
}

JobResult result_from_json(const json& j) {
  JobResult r;
  r.key = j.at("key").get<std::string>();
  r.status = j.value("status", "ok");
  r.mode = j.value("mode", "");
  r.shots = j.value("shots", 0L);
  r.seed = j.value("seed", std::uint64_t{0});
  r.attempts = j.value("attempts", 0);
  r.error = j.value("error", "");
  if (j.contains("histogram")) r.counts = j["histogram"].get<std::vector<long>>();
  if (j.contains("probabilities")) {
    const auto p = j["probabilities"].get<std::vector<double>>();
    r.probabilities = Eigen::Map<const Vec>(p.data(), static_cast<Eigen::Index>(p.size()));
  }
  r.wall_ms = j.value("wall_ms", 0.0);
  return r;
}

std::string canonical_results(const std::map<std::string, JobResult>& results) {
  json doc = json::object();
  for (const auto& [k, r] : results) doc[k] = result_to_json(r, false);
  return doc.dump(1);
}

ResultsStore::ResultsStore(std::string dir) : dir_(std::move(dir)) { fs::create_directories(dir_); }

std::string ResultsStore::path_for(const std::string& key) const { return (fs::path(dir_) / (key + ".json")).string(); }

bool ResultsStore::contains(const std::string& key) const {
  if (!fs::exists(path_for(key))) return false;
  try {
    return get(key).status == "ok";
  } catch (...) {
    return false;  // torn write from an interrupted run
  }
}

void ResultsStore::put(const JobResult& r) {
  const std::string p = path_for(r.key), tmp = p + ".tmp";
  {
    std::ofstream f(tmp);
    f << result_to_json(r, false).dump() << '\n';
  }
  fs::rename(tmp, p);
}

JobResult ResultsStore::get(const std::string& key) const {
  std::ifstream f(path_for(key));
  if (!f) throw IncompleteError("results store: missing job '" + key + "'");
  try {
    return result_from_json(json::parse(f));
  } catch (const json::exception& e) {
    throw ParseError("results store: corrupt record '" + key + "': " + e.what());
  }
}

std::vector<std::string> ResultsStore::keys() const {
  std::vector<std::string> out;
  for (const auto& e : fs::directory_iterator(dir_)) {
    const auto name = e.path().filename().string();
    // index.json and options.json are store metadata, not job records
    if (e.path().extension() == ".json" && name != "index.json" && name != "options.json")
      out.push_back(e.path().stem().string());
  }
  std::sort(out.begin(), out.end());
  return out;
}

void ResultsStore::write_index() const {
  json j = {{"keys", keys()}};
  std::ofstream f((fs::path(dir_) / "index.json").string());
  f << j.dump(1) << '\n';
}

}  // namespace qvib
