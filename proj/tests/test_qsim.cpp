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

#include <atomic>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>

#include "qvib/circuit.hpp"
#include "qvib/errors.hpp"
#include "qvib/qsim.hpp"

using namespace qvib;
namespace fs = std::filesystem;

namespace {

Circuit random_circuit(int width, int n, std::mt19937_64& rng) {
  std::uniform_int_distribution<int> q(0, width - 1), kind(0, 3);
  std::uniform_real_distribution<double> ang(-3.0, 3.0);
  Circuit c;
  c.width = width;
  for (int k = 0; k < n; ++k) {
    switch (kind(rng)) {
      case 0: c.rz(q(rng), ang(rng)); break;
      case 1: c.sx(q(rng)); break;
      case 2: c.h(q(rng)); break;
      default: {
        if (width < 2) {
          c.h(0);
          break;
        }
        const int a = q(rng);
        int b = q(rng);
        if (b == a) b = (a + 1) % width;
        c.cx(a, b);
      }
    }
  }
  return c;
}

std::vector<JobSpec> grid_jobs(int n_times) {
  std::vector<JobSpec> jobs;
  for (std::string h : {"x1", "x2"})
    for (std::string b : {"upper", "lower"})
      for (std::string s : {"g1", "g2"})
        for (int k = 0; k < n_times; ++k) {
          JobSpec j;
          j.hamiltonian = h;
          j.block = b;
          j.initial_state = s;
          j.time_index = k;
          j.shots = 200;
          jobs.push_back(j);
        }
  return jobs;
}

Circuit job_circuit(const JobSpec& j) {
  std::mt19937_64 rng(fnv1a(j.key()));
  return random_circuit(2, 12, rng);
}

double total_variation(const Vec& a, const Vec& b) { return 0.5 * (a - b).cwiseAbs().sum(); }

}  // namespace

TEST_CASE("simulate: small circuits") {
  Circuit e;
  e.width = 3;
  const auto s0 = simulate(e);
  CHECK(std::abs(s0.amp(0)) == doctest::Approx(1.0));
  CHECK(s0.amp.norm() == doctest::Approx(1.0));

  Circuit x;
  x.width = 1;
  x.sx(0);
  x.sx(0);
  CHECK(simulate(x).probabilities()(1) == doctest::Approx(1.0));

  Circuit c;
  c.width = 2;
  c.cx(0, 1);
  CVec init = CVec::Zero(4);
  init(2) = 1.0;
  CHECK(simulate(c, &init).probabilities()(3) == doctest::Approx(1.0));

  Circuit wide;
  wide.width = kMaxStatevectorWidth + 1;
  CHECK_THROWS_AS(simulate(wide), DomainError);
  CVec bad = CVec::Zero(3);
  CHECK_THROWS_AS(simulate(c, &bad), DomainError);
}

TEST_CASE("norm preserved through long random circuits") {
  std::mt19937_64 rng(11);
  for (int w : {1, 2, 3, 5}) {
    const Circuit c = random_circuit(w, 500, rng);
    CHECK(std::abs(simulate(c).amp.norm() - 1.0) <= 5e-12);
  }
}

TEST_CASE("sampling") {
  Vec basis = Vec::Zero(4);
  basis(2) = 1.0;
  const auto h = sample(basis, 777, 3);
  CHECK(h.counts[2] == 777);
  CHECK(h.shots == 777);

  const Vec uni = Vec::Constant(4, 0.25);
  const long n = 1000000;
  const auto u = sample(uni, n, 42);
  const double sigma = std::sqrt(n * 0.25 * 0.75);
  long total = 0;
  for (long c : u.counts) {
    CHECK(std::abs(c - 0.25 * n) < 5 * sigma);
    total += c;
  }
  CHECK(total == n);

  const auto a = sample(uni, 1000, 9), b = sample(uni, 1000, 9);
  CHECK(a.counts == b.counts);
  CHECK(sample(uni, 1000, 10).counts != a.counts);
  CHECK_THROWS_AS(sample(uni, 0, 1), DomainError);
}

TEST_CASE("sampled densities converge to exact probabilities") {
  std::mt19937_64 rng(5);
  int ok3 = 0, ok5 = 0;
  const int trials = 100;
  for (int t = 0; t < trials; ++t) {
    const Circuit c = random_circuit(3, 30, rng);
    const Vec p = simulate(c).probabilities();
    for (long shots : {1000L, 100000L}) {
      const auto h = sample(p, shots, 1000 + t);
      Vec d(p.size());
      for (Eigen::Index k = 0; k < p.size(); ++k) d(k) = double(h.counts[k]) / shots;
      const bool ok = total_variation(d, p) <= 3.0 * std::sqrt(double(p.size()) / shots);
      (shots == 1000 ? ok3 : ok5) += ok;
    }
  }
  CHECK(ok3 >= 99);
  CHECK(ok5 >= 99);
}

TEST_CASE("depolarizing noise") {
  std::mt19937_64 rng(3);
  for (int w : {2, 3, 4}) {
    const Circuit c = random_circuit(w, 40, rng);
    const Vec clean = simulate(c).probabilities();
    CHECK((apply_noise(c, {0.0}) - clean).cwiseAbs().maxCoeff() <= 1e-12);
    const CMat rho = density_matrix_run(c, {0.05});
    CHECK(std::abs(rho.trace() - cplx(1.0)) < 1e-12);
    CHECK((rho - rho.adjoint()).norm() < 1e-12);
    CHECK(Eigen::SelfAdjointEigenSolver<CMat>(rho).eigenvalues().minCoeff() > -1e-12);
  }

  Circuit one;
  one.width = 2;
  one.h(0);
  one.cx(0, 1);
  const CMat mixed = density_matrix_run(one, {1.0});
  CHECK((mixed - CMat::Identity(4, 4) / 4.0).norm() < 1e-12);

  // pair channel on a 3-qubit register leaves the spectator alone
  Circuit three;
  three.width = 3;
  three.sx(2);
  three.sx(2);
  three.cx(0, 1);
  const Vec p3 = apply_noise(three, {1.0});
  for (int k = 0; k < 8; ++k) CHECK(p3(k) == doctest::Approx((k & 1) ? 0.25 : 0.0));

  Circuit wide;
  wide.width = kMaxDensityWidth + 1;
  CHECK_THROWS_AS(apply_noise(wide, {0.1}), DomainError);
  CHECK_THROWS_AS(apply_noise(one, {1.5}), DomainError);
  CHECK_THROWS_AS(apply_noise(one, {-0.1}), DomainError);
}

TEST_CASE("job keys and seeds") {
  JobSpec j;
  j.hamiltonian = "x1";
  j.block = "upper";
  j.initial_state = "g3";
  j.time_index = 17;
  CHECK(j.key() == "x1_upper_c0-0_g3_t0017");
  CHECK(job_seed(1, j.key()) == job_seed(1, j.key()));
  CHECK(job_seed(1, j.key()) != job_seed(2, j.key()));
}

TEST_CASE("scheduler: determinism across worker counts") {
  const auto jobs = grid_jobs(40);
  ExecOptions o1;
  o1.global_seed = 99;
  o1.workers = 1;
  ExecOptions o8 = o1;
  o8.workers = 8;
  const auto r1 = run_schedule(jobs, job_circuit, o1);
  const auto r8 = run_schedule(jobs, job_circuit, o8);
  CHECK(canonical_results(r1) == canonical_results(r8));
  for (const auto& [k, r] : r1) {
    long s = 0;
    for (long c : r.counts) s += c;
    CHECK(s == r.shots);
  }
  ExecOptions other = o1;
  other.global_seed = 100;
  CHECK(canonical_results(run_schedule(jobs, job_circuit, other)) != canonical_results(r1));

  // statevector and density modes are independent of the pool too
  o1.statevector = o8.statevector = true;
  o1.noise.p = o8.noise.p = 0.03;
  CHECK(canonical_results(run_schedule(jobs, job_circuit, o1)) ==
        canonical_results(run_schedule(jobs, job_circuit, o8)));
}

TEST_CASE("scheduler: completeness at full size") {
  const auto jobs = grid_jobs(160);
  REQUIRE(jobs.size() == 1280);
  std::atomic<int> calls{0};
  ExecOptions o;
  o.workers = 8;
  o.global_seed = 1;
  const auto r = run_schedule(
      jobs,
      [&](const JobSpec& j) {
        ++calls;
        return job_circuit(j);
      },
      o);
  CHECK(r.size() == 1280);
  CHECK(calls.load() == 1280);
  for (const auto& j : jobs) {
    REQUIRE(r.count(j.key()) == 1);
    CHECK(r.at(j.key()).status == "ok");
    CHECK(r.at(j.key()).attempts == 1);
  }

  auto dup = jobs;
  dup.push_back(jobs.front());
  CHECK_THROWS_AS(run_schedule(dup, job_circuit, o), DomainError);
}

TEST_CASE("scheduler: fault injection") {
  const auto jobs = grid_jobs(10);
  ExecOptions clean;
  clean.global_seed = 7;
  clean.workers = 4;
  const auto ref = run_schedule(jobs, job_circuit, clean);

  const std::string flaky = jobs[3].key(), dead = jobs[17].key();
  ExecOptions o = clean;
  o.fault = [&](const JobSpec& j, int attempt) {
    if (j.key() == flaky) return attempt == 0;
    return j.key() == dead;
  };
  const auto r = run_schedule(jobs, job_circuit, o);
  REQUIRE(r.size() == jobs.size());
  CHECK(r.at(flaky).status == "ok");
  CHECK(r.at(flaky).attempts == 2);
  CHECK(r.at(flaky).counts == ref.at(flaky).counts);
  CHECK(r.at(dead).status == "failed");
  CHECK(r.at(dead).attempts == 2);
  CHECK(!r.at(dead).error.empty());
  for (const auto& [k, v] : r) {
    if (k == flaky || k == dead) continue;
    CHECK(v.status == "ok");
    CHECK(v.counts == ref.at(k).counts);
  }
}

TEST_CASE("results store") {
  const fs::path dir = fs::temp_directory_path() / "qvib_test_store";
  fs::remove_all(dir);
  ResultsStore store(dir.string());
  const auto jobs = grid_jobs(3);
  ExecOptions o;
  o.global_seed = 4;
  const auto r = run_schedule(jobs, job_circuit, o);
  for (const auto& [k, v] : r) store.put(v);
  store.write_index();
  CHECK(store.keys().size() == r.size());
  CHECK(fs::exists(dir / "index.json"));
  std::map<std::string, JobResult> back;
  for (const auto& k : store.keys()) {
    CHECK(store.contains(k));
    back.emplace(k, store.get(k));
  }
  CHECK(canonical_results(back) == canonical_results(r));
  CHECK(!store.contains("nope"));
  CHECK_THROWS_AS(store.get("nope"), IncompleteError);

  // a torn record is treated as absent, and reported on read
  { std::ofstream(dir / "broken.json") << "{\"key\": "; }
  CHECK(!store.contains("broken"));
  CHECK_THROWS_AS(store.get("broken"), ParseError);

  JobResult failed;
  failed.key = "f";
  failed.status = "failed";
  store.put(failed);
  CHECK(!store.contains("f"));
  fs::remove_all(dir);
}
