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

#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include "qvib/config.hpp"
#include "qvib/errors.hpp"
#include "qvib/pipeline.hpp"

using namespace qvib;
namespace fs = std::filesystem;

namespace {

PipelineConfig parse(const std::string& text) {
  std::istringstream in(text);
  return parse_config(in, "t.toml");
}

std::string parse_error(const std::string& text) {
  try {
    parse(text);
  } catch (const ParseError& e) {
    return e.what();
  }
  return "";
}

fs::path fresh_dir(const std::string& name) {
  const fs::path d = fs::temp_directory_path() / name;
  fs::remove_all(d);
  return d;
}

std::map<std::string, std::string> snapshot(const fs::path& root) {
  std::map<std::string, std::string> out;
  for (const auto& e : fs::recursive_directory_iterator(root)) {
    if (!e.is_regular_file()) continue;
    std::ifstream f(e.path(), std::ios::binary);
    std::stringstream ss;
    ss << f.rdbuf();
    out[fs::relative(e.path(), root).string()] = ss.str();
  }
  return out;
}

ExecOptions exec_opts(const PipelineConfig& c) {
  ExecOptions o;
  o.workers = c.workers;
  o.global_seed = c.seed;
  o.statevector = c.statevector;
  o.noise.p = c.noise;
  return o;
}

void run_all(const PipelineConfig& c) {
  cmd_build(c);
  cmd_factorize(c);
  cmd_compile(c);
  cmd_run(c, exec_opts(c));
  cmd_analyze(c);
  cmd_report(c);
}

}  // namespace

TEST_CASE("config defaults mirror the run tables") {
  const auto c = PipelineConfig::defaults();
  CHECK(c.x1.points == 8);
  CHECK(c.x2.points == 8);
  CHECK(c.x1.block.dt_fs == 2.5);
  CHECK(c.x1.block.total_fs == 400);
  CHECK(c.x1.full.dt_fs == 100);
  CHECK(c.x1.full.total_fs == 16000);
  CHECK(c.x2.block.dt_fs == 1.47);
  CHECK(c.x2.block.total_fs == 235);
  CHECK(c.x2.full.dt_fs == 7);
  CHECK(c.x2.full.total_fs == 1120);
  CHECK(c.shots == 1000);
  CHECK(c.noise == 0.0);
  std::size_t n = 0;
  for (const auto& r : c.states) n += r.grid_labels.size();
  CHECK(n == 16);
  CHECK_NOTHROW(c.validate());
}

TEST_CASE("config: text roundtrip and the checked-in example") {
  const auto d = PipelineConfig::defaults();
  CHECK(config_to_toml(parse(config_to_toml(d))) == config_to_toml(d));
  const auto doc = load_config(std::string(QVIB_SOURCE_DIR) + "/docs/qvib.toml");
  CHECK(config_to_toml(doc) == config_to_toml(d));
}

TEST_CASE("config: overrides") {
  const auto c = parse(
      "# comment\n[run]\nshots = 250  # trailing\nnoise = 0.02\nstatevector = true\n"
      "[states]\nx1_upper = [2, 3]\n[output]\ndir = \"elsewhere\"\n[schedule]\nx2_full_dt_fs = 14\n");
  CHECK(c.shots == 250);
  CHECK(c.noise == 0.02);
  CHECK(c.statevector);
  CHECK(c.outdir == "elsewhere");
  CHECK(c.x2.full.dt_fs == 14);
  bool found = false;
  for (const auto& r : c.states)
    if (r.mode == "x1" && r.run == "upper") {
      found = true;
      CHECK(r.grid_labels == std::vector<int>{2, 3});
    }
  CHECK(found);
}

TEST_CASE("config: errors carry a location") {
  CHECK(parse_error("[run]\nbogus = 1\n").find("t.toml:2") != std::string::npos);
  CHECK(parse_error("[nowhere]\nx = 1\n").find("t.toml:") != std::string::npos);
  CHECK(parse_error("[run]\nshots = 1\nshots = 2\n").find("t.toml:3") != std::string::npos);
  CHECK(parse_error("[run]\nshots = many\n").find("t.toml:2") != std::string::npos);
  CHECK(parse_error("[run\n").find("t.toml:1") != std::string::npos);
  CHECK(parse_error("shots\n") != "");
  // semantic checks
  CHECK(parse_error("[states]\nx1_upper = [5]\n") != "");   // lower-half label in the upper block
  CHECK(parse_error("[states]\nx1_lower = [2]\n") != "");
  CHECK(parse_error("[states]\nx2_full = [9]\n") != "");
  CHECK(parse_error("[schedule]\nx1_block_dt_fs = -1\n") != "");
  CHECK(parse_error("[run]\nnoise = 1.5\n") != "");
  CHECK(parse_error("[run]\nworkers = 0\n") != "");
  CHECK(parse_error("[grid]\nx1_points = 16\n") != "");
  CHECK_THROWS_AS(load_config("/nonexistent/qvib.toml"), ParseError);
}

TEST_CASE("model build: structure and symmetry") {
  const auto c = PipelineConfig::defaults();
  const Model m = build_model(c);
  CHECK(m.h2d.matrix.rows() == 64);
  CHECK(m.exact.eigenvalues.size() == 64);
  CHECK(!m.family1.empty());
  CHECK(!m.family2.empty());
  for (const auto& e : m.family1) CHECK(e.matrix.rows() == 8);
  for (const ModeModel* mm : {&m.x1, &m.x2}) {
    CHECK(mm->dec.offdiag_residual <= 1e-12);
    CHECK(mm->shuffled_h.topRightCorner(4, 4).cwiseAbs().maxCoeff() <= 1e-12);
  }
  const auto jobs = schedule_jobs(c);
  // 4 block rows of 161 points each per state, full rows likewise
  std::size_t expect = 0;
  for (const auto& r : c.states) expect += r.grid_labels.size() * (c.mode(r.mode).block.n_steps() + 1);
  CHECK(jobs.size() == expect);
}

TEST_CASE("staged pipeline: statevector run, rerun, byte stability") {
  auto c = PipelineConfig::defaults();
  c.outdir = fresh_dir("qvib_test_pipe_a").string();
  c.statevector = true;

  CHECK_THROWS_AS(cmd_factorize(c), IncompleteError);
  CHECK_THROWS_AS(cmd_analyze(c), IncompleteError);
  const std::string b = cmd_build(c);
  CHECK(b.find("64 exact levels") != std::string::npos);
  CHECK_THROWS_AS(cmd_run(c, exec_opts(c)), IncompleteError);  // nothing compiled yet
  cmd_factorize(c);
  cmd_compile(c);
  CHECK_THROWS_AS(cmd_analyze(c), IncompleteError);  // empty store
  const std::string r1 = cmd_run(c, exec_opts(c));
  CHECK(r1.find(" 0 failed") != std::string::npos);
  const std::string r2 = cmd_run(c, exec_opts(c));
  CHECK(r2.rfind("run: 0 executed", 0) == 0);
  cmd_analyze(c);
  cmd_report(c);

  for (const char* sub : {"hamiltonians", "channels", "circuits", "results", "spectra", "report"})
    CHECK(fs::is_directory(fs::path(c.outdir) / sub));

  std::ifstream bl(fs::path(c.outdir) / "hamiltonians" / "build.log");
  std::stringstream log;
  log << bl.rdbuf();
  CHECK(log.str().find("offdiag") != std::string::npos);

  std::ifstream rep(fs::path(c.outdir) / "report" / "report.md");
  std::stringstream md;
  md << rep.rdbuf();
  CHECK(md.str().find("| 1.250 | 200.0 |") != std::string::npos);
  CHECK(md.str().find("| 0.031 | 5.0 |") != std::string::npos);
  CHECK(md.str().find("| 2.128 | 340.1 |") != std::string::npos);
  CHECK(md.str().find("| 0.446 | 71.4 |") != std::string::npos);

  const auto a = analyze(c, build_model(c), [&] {
    std::map<std::string, JobResult> res;
    ResultsStore s((fs::path(c.outdir) / "results").string());
    for (const auto& k : s.keys()) res.emplace(k, s.get(k));
    return res;
  }());
  CHECK(a.mae_kcal <= 0.2);
  CHECK(a.max_wavepacket_error <= 1e-6);

  // rerunning every stage on an unchanged config rewrites identical bytes
  const auto before = snapshot(c.outdir);
  run_all(c);
  CHECK(snapshot(c.outdir) == before);

  // an incomplete store names what is missing
  const fs::path victim = fs::path(c.outdir) / "results" / "x1_upper_c0-0_g1_t0003.json";
  REQUIRE(fs::exists(victim));
  fs::remove(victim);
  try {
    cmd_analyze(c);
    CHECK(false);
  } catch (const IncompleteError& e) {
    CHECK(std::string(e.what()).find("x1_upper_c0-0_g1_t0003") != std::string::npos);
  }

  // a different seed or mode may not mix into the same store
  auto other = exec_opts(c);
  other.statevector = false;
  CHECK_THROWS_AS(cmd_run(c, other), ParseError);

  // stale artifacts after a surface change
  auto changed = c;
  changed.pes.gating = 0.2;
  CHECK_THROWS_AS(cmd_factorize(changed), IncompleteError);
  fs::remove_all(c.outdir);
}

TEST_CASE("staged pipeline: worker count does not change the store") {
  std::map<std::string, std::string> snaps[2];
  int i = 0;
  for (int w : {1, 8}) {
    auto c = PipelineConfig::defaults();
    c.outdir = fresh_dir("qvib_test_pipe_w" + std::to_string(w)).string();
    c.workers = w;
    run_all(c);
    snaps[i++] = snapshot(fs::path(c.outdir) / "results");
    fs::remove_all(c.outdir);
  }
  CHECK(snaps[0].size() > 1000);
  CHECK(snaps[0] == snaps[1]);
}

TEST_CASE("tabulated surface file") {
  auto c = PipelineConfig::defaults();
  const fs::path dir = fresh_dir("qvib_test_pes");
  fs::create_directories(dir);
  c.outdir = (dir / "out").string();
  cmd_build(c);
  // reload the surface the build wrote
  auto f = c;
  f.pes_file = (fs::path(c.outdir) / "hamiltonians" / "pes.txt").string();
  f.outdir = (dir / "out2").string();
  cmd_build(f);
  const Model a = build_model(c), b = build_model(f);
  CHECK((a.h2d.matrix - b.h2d.matrix).cwiseAbs().maxCoeff() <= 1e-12);
  f.pes_file = (dir / "missing.txt").string();
  CHECK_THROWS_AS(cmd_build(f), ParseError);
  fs::remove_all(dir);
}
