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

#include "qvib/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "qvib/errors.hpp"
#include "qvib/units.hpp"

namespace qvib {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

const char* kModes[] = {"x1", "x2"};

std::string run_key(const std::string& mode, const std::string& run) { return mode + "_" + run; }

int state_index(const ModeModel& m, const std::string& run, int label) {
  const int h = m.grid.n / 2;
  if (run == "upper") return label - 1;
  if (run == "lower") return label - 1 - h;
  return label - 1;
}

const SimulationSchedule& schedule_of(const ModeModel& m, const std::string& run) {
  return run == "full" ? m.full : m.block;
}

const Mat& block_of(const ModeModel& m, const std::string& run) {
  if (run == "upper") return m.dec.upper;
  if (run == "lower") return m.dec.lower;
  throw DomainError("no block named '" + run + "'");
}

void write_file(const fs::path& p, const std::string& text) {
  fs::create_directories(p.parent_path());
  const fs::path tmp = p.string() + ".tmp";
  {
    std::ofstream f(tmp, std::ios::binary);
    if (!f) throw std::runtime_error("cannot write " + p.string());
    f << text;
  }
  fs::rename(tmp, p);
}

json read_json(const fs::path& p, const std::string& hint) {
  std::ifstream f(p);
  if (!f) throw IncompleteError("missing " + p.string() + "; run `qvib " + hint + "` first");
  try {
    return json::parse(f);
  } catch (const json::exception& e) {
    throw ParseError("corrupt " + p.string() + ": " + e.what());
  }
}

Vec eigenvalues(const Mat& h) { return Eigen::SelfAdjointEigenSolver<Mat>(h, Eigen::EigenvaluesOnly).eigenvalues(); }

json vec_json(const Vec& v) { return std::vector<double>(v.data(), v.data() + v.size()); }

// later stages rebuild the model from the config and refuse to mix it with
// artifacts written for a different one
Model checked_model(const PipelineConfig& cfg) {
  const json man = read_json(fs::path(cfg.outdir) / "hamiltonians" / "manifest.json", "build");
  Model m = build_model(cfg);
  const bool same = man.value("h2d_checksum", "") == matrix_checksum(m.h2d.matrix) &&
                    man.value("x1_checksum", "") == matrix_checksum(m.x1.h) &&
                    man.value("x2_checksum", "") == matrix_checksum(m.x2.h);
  if (!same) throw IncompleteError("hamiltonian artifacts in " + cfg.outdir + " are stale for this config; rerun `qvib build`");
  return m;
}

std::string fmt(const char* f, double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, x);
  return buf;
}

}  // namespace

const ModeModel& Model::mode(const std::string& name) const {
  if (name == "x1") return x1;
  if (name == "x2") return x2;
  throw DomainError("unknown mode '" + name + "'");
}

json matrix_to_json(const Mat& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) rows.push_back(vec_json(m.row(i).transpose()));
  return rows;
}

Mat matrix_from_json(const json& j) {
  if (!j.is_array() || j.empty()) throw ParseError("matrix: expected a non-empty array of rows");
  const auto n = j.size(), c = j[0].size();
  Mat m(n, c);
  for (std::size_t i = 0; i < n; ++i) {
    if (j[i].size() != c) throw ParseError("matrix: ragged rows");
    for (std::size_t k = 0; k < c; ++k) m(i, k) = j[i][k].get<double>();
  }
  return m;
}

Model build_model(const PipelineConfig& cfg) {
  cfg.validate();
  Model m;
  m.x1.name = "x1";
  m.x2.name = "x2";
  m.x1.grid = build_grid_range(cfg.x1.points, units::angstrom_to_bohr(cfg.x1.lo), units::angstrom_to_bohr(cfg.x1.hi));
  m.x2.grid = build_grid_range(cfg.x2.points, units::deg_to_rad(cfg.x2.lo), units::deg_to_rad(cfg.x2.hi));
  for (auto [mm, spec] : {std::pair{&m.x1, &cfg.x1}, std::pair{&m.x2, &cfg.x2}}) {
    mm->kinetic = daf_kinetic(mm->grid, default_daf(mm->grid, units::amu_to_me(spec->mass_amu), cfg.daf_sigma_ratio, cfg.daf_m));
    mm->block = spec->block;
    mm->full = spec->full;
  }
  if (cfg.pes_file.empty()) {
    m.pes = synthetic_pes(cfg.pes, m.x1.grid, m.x2.grid);
  } else {
    m.pes = load_pes(cfg.pes_file);
    if (m.pes.values.rows() != m.x1.grid.n || m.pes.values.cols() != m.x2.grid.n)
      throw ParseError("pes file " + cfg.pes_file + " does not match the configured grid");
  }
  m.h2d = assemble_h2d(m.x1.kinetic, m.x2.kinetic, m.pes.values);
  m.exact = exact_eigensolve(m.h2d.matrix);
  m.channels = factor_potential_propagator(m.pes, cfg.channel_dt_fs, cfg.channel_tol);
  m.family1 = effective_family(m.x1.kinetic, m.channels, 1);
  m.family2 = effective_family(m.x2.kinetic, m.channels, 2);
  for (auto [mm, fam] : {std::pair{&m.x1, &m.family1}, std::pair{&m.x2, &m.family2}}) {
    const auto it = std::find_if(fam->begin(), fam->end(), [](const auto& e) { return e.gamma == 0 && e.beta == 0; });
    if (it == fam->end()) throw DomainError("dominant potential channel has nodes; no effective Hamiltonian for " + mm->name);
    mm->h = it->matrix;
    mm->dec = givens_transform(mm->h);
    const Mat s = shuffled_basis_map(mm->grid.n).shuffled_matrix();
    mm->shuffled_h = s.transpose() * mm->h * s;
  }
  return m;
}

std::vector<Circuit> compile_run(const ModeModel& m, const std::string& run) {
  if (m.dec.offdiag_residual > 1e-9)
    throw DomainError(m.name + ": Hamiltonian is not centrosymmetric (off-diagonal block residual " +
                      fmt("%.3g", m.dec.offdiag_residual) + "); block runs need a symmetric surface");
  const auto& sched = schedule_of(m, run);
  const int h = m.grid.n / 2;
  std::vector<Circuit> out;
  for (int k = 0; k <= sched.n_steps(); ++k) {
    const double t = units::fs_to_au(k * sched.dt_fs);
    Circuit c;
    if (run == "full") {
      const CMat u0 = evolution_operator(m.shuffled_h.topLeftCorner(h, h), t);
      const CMat u1 = evolution_operator(m.shuffled_h.bottomRightCorner(h, h), t);
      c = append_grid_basis_map(compile_block_diagonal(u0, u1));
    } else {
      c = kak_compile(evolution_operator(block_of(m, run), t));
    }
    c.time_index = k;
    out.push_back(std::move(c));
  }
  return out;
}

std::vector<JobSpec> schedule_jobs(const PipelineConfig& cfg) {
  std::vector<JobSpec> jobs;
  for (const auto& row : cfg.states) {
    const auto& sched = row.run == "full" ? cfg.mode(row.mode).full : cfg.mode(row.mode).block;
    for (int g : row.grid_labels)
      for (int k = 0; k <= sched.n_steps(); ++k)
        jobs.push_back({row.mode, row.run, 0, 0, "g" + std::to_string(g), k, cfg.shots});
  }
  return jobs;
}

Circuit job_circuit(const ModeModel& m, const JobSpec& job, const Circuit& evolution) {
  const int label = std::stoi(job.initial_state.substr(1));
  Circuit c = job.block == "full" ? prepare_delta_state(state_index(m, job.block, label), PrepBasis::Shuffled, 3)
                                  : prepare_delta_state(state_index(m, job.block, label), PrepBasis::Computational, 2);
  if (c.width != evolution.width) throw DomainError("job_circuit: width mismatch for " + job.key());
  c.append(evolution);
  c.target_checksum = evolution.target_checksum;
  c.time_index = evolution.time_index;
  return c;
}

CircuitBank compile_all(const Model& model) {
  CircuitBank bank;
  for (const char* mode : kModes)
    for (const char* run : {"upper", "lower", "full"}) bank[run_key(mode, run)] = compile_run(model.mode(mode), run);
  return bank;
}

std::map<std::string, JobResult> execute_all(const PipelineConfig& cfg, const Model& model, const CircuitBank& bank,
                                             const ExecOptions& opt) {
  const auto jobs = schedule_jobs(cfg);
  return run_schedule(
      jobs,
      [&](const JobSpec& j) {
        const auto& v = bank.at(run_key(j.hamiltonian, j.block));
        return job_circuit(model.mode(j.hamiltonian), j, v.at(j.time_index));
      },
      opt);
}

TimeTrace quantum_trace(const PipelineConfig& cfg, const Model& model, const std::string& mode, const std::string& run,
                        int grid_label, const std::map<std::string, JobResult>& results) {
  const ModeModel& m = model.mode(mode);
  const auto& sched = schedule_of(m, run);
  const int width = run == "full" ? m.grid.n : m.grid.n / 2;
  TimeTrace tr;
  tr.schedule = sched;
  tr.label = run_key(mode, run) + "_g" + std::to_string(grid_label);
  tr.density.resize(sched.n_steps() + 1, width);
  const BasisTable table = shuffled_basis_map(m.grid.n);
  for (int k = 0; k <= sched.n_steps(); ++k) {
    const JobSpec spec{mode, run, 0, 0, "g" + std::to_string(grid_label), k, cfg.shots};
    const auto it = results.find(spec.key());
    if (it == results.end()) throw IncompleteError("missing job result '" + spec.key() + "'");
    if (it->second.status != "ok") throw IncompleteError("job '" + spec.key() + "' failed: " + it->second.error);
    const Vec d = it->second.distribution();
    if (d.size() != width) throw ParseError("job '" + spec.key() + "' has the wrong outcome count");
    tr.density.row(k) = (run == "full" ? hadamard_grid_readout(d, table) : d).transpose();
  }
  return tr;
}

TimeTrace classical_trace(const Model& model, const std::string& mode, const std::string& run, int grid_label) {
  const ModeModel& m = model.mode(mode);
  const Mat& h = run == "full" ? m.h : block_of(m, run);
  CVec psi0 = CVec::Zero(h.rows());
  psi0(state_index(m, run, grid_label)) = 1.0;
  TimeTrace tr = classical_propagate(h, psi0, schedule_of(m, run));
  tr.label = run_key(mode, run) + "_g" + std::to_string(grid_label);
  return tr;
}

const RunAnalysis& Analysis::run(const std::string& mode, const std::string& r) const {
  for (const auto& x : runs)
    if (x.mode == mode && x.run == r) return x;
  throw DomainError("no analysed run " + run_key(mode, r));
}

Analysis analyze(const PipelineConfig& cfg, const Model& model, const std::map<std::string, JobResult>& results) {
  Analysis a;
  std::map<std::string, std::vector<PowerSpectrum>> per_run;
  for (const auto& row : cfg.states)
    for (int g : row.grid_labels) {
      TraceAnalysis t;
      t.mode = row.mode;
      t.run = row.run;
      t.grid_label = g;
      t.quantum = quantum_trace(cfg, model, row.mode, row.run, g, results);
      t.spectrum = power_spectrum(trace_fft(t.quantum), t.quantum.label);
      if ((t.spectrum.power.array() > t.spectrum.upper_bound * (1 + 1e-12)).any())
        throw std::logic_error("spectrum of " + t.quantum.label + " exceeds its Cauchy-Schwarz bound");
      t.wavepacket_error = wavepacket_error(t.quantum, classical_trace(model, row.mode, row.run, g));
      a.max_wavepacket_error = std::max(a.max_wavepacket_error, t.wavepacket_error);
      per_run[run_key(row.mode, row.run)].push_back(t.spectrum);
      a.traces.push_back(std::move(t));
    }

  PeakOptions popt;
  popt.floor = cfg.peak_floor;
  for (const char* mode : kModes) {
    const ModeModel& m = model.mode(mode);
    std::vector<BlockPeaks> blocks;
    FullSpectrumPeaks full;
    for (const char* run : {"upper", "lower", "full"}) {
      const auto it = per_run.find(run_key(mode, run));
      if (it == per_run.end()) continue;
      RunAnalysis r;
      r.mode = mode;
      r.run = run;
      r.cumulative = cumulate(it->second);
      r.peaks = detect_peaks(r.cumulative, popt);
      r.bin_width_thz = schedule_of(m, run).bin_width_thz();
      if (std::string(run) != "full") {
        const Vec e = eigenvalues(block_of(m, run));
        for (const auto& p : r.peaks) {
          double d = 1e300;
          for (Eigen::Index i = 0; i < e.size(); ++i)
            for (Eigen::Index j = i + 1; j < e.size(); ++j)
              d = std::min(d, std::abs(units::hartree_to_thz(e(j) - e(i)) - p.freq_thz));
          r.max_peak_gap_dev_thz = std::max(r.max_peak_gap_dev_thz, d);
        }
        blocks.push_back({run, r.peaks, m.grid.n / 2, r.bin_width_thz / 2});
      } else {
        full = {r.peaks, m.full.omega_max_thz(), r.bin_width_thz};
      }
      a.runs.push_back(std::move(r));
    }
    if (blocks.empty()) continue;
    a.ladders[mode] = reconstruct_ladder(blocks, full);
    if (a.ladders[mode].levels.size() == static_cast<std::size_t>(m.grid.n))
      a.mode_mae_kcal[mode] = ladder_mae(a.ladders[mode].thz(), eigenvalues(m.h), m.grid.n);
  }
  if (a.ladders.count("x1") && a.ladders.count("x2")) {
    a.combined_thz = combine_ladders(a.ladders["x1"].thz(), a.ladders["x2"].thz());
    const int k = std::min<int>(cfg.mae_levels, a.combined_thz.size());
    a.mae_kcal = ladder_mae(a.combined_thz, model.exact.eigenvalues, k);
  }
  return a;
}

// ------------------------------------------------------------------ stages

std::string cmd_build(const PipelineConfig& cfg) {
  const Model m = build_model(cfg);
  const fs::path dir = fs::path(cfg.outdir) / "hamiltonians";
  fs::create_directories(dir);
  {
    std::ostringstream o;
    write_pes(o, m.pes);
    write_file(dir / "pes.txt", o.str());
  }
  write_file(dir / "h2d.json", json{{"n1", m.h2d.n1}, {"n2", m.h2d.n2}, {"checksum", matrix_checksum(m.h2d.matrix)},
                                    {"matrix", matrix_to_json(m.h2d.matrix)}}
                                   .dump(1) + "\n");
  const Vec& ev = m.exact.eigenvalues;
  Vec rel(ev.size());
  for (Eigen::Index i = 0; i < ev.size(); ++i) rel(i) = units::hartree_to_kcal(ev(i) - ev(0));
  write_file(dir / "exact_ladder.json",
             json{{"levels", ev.size()}, {"hartree", vec_json(ev)}, {"kcal_mol_above_ground", vec_json(rel)}}.dump(1) + "\n");
  for (auto [name, fam] : {std::pair{"x1", &m.family1}, std::pair{"x2", &m.family2}}) {
    json arr = json::array();
    for (const auto& e : *fam)
      arr.push_back({{"gamma", e.gamma}, {"beta", e.beta}, {"checksum", matrix_checksum(e.matrix)},
                     {"matrix", matrix_to_json(e.matrix)}});
    write_file(dir / (std::string(name) + "_family.json"), json{{"mode", name}, {"members", arr}}.dump(1) + "\n");
  }
  std::ostringstream log;
  log << "surface: " << (cfg.pes_file.empty() ? "synthetic" : cfg.pes_file)
      << (m.pes.symmetric ? " (inversion symmetric)" : " (not symmetric)") << "\n";
  log << "h2d: " << m.h2d.matrix.rows() << "x" << m.h2d.matrix.cols() << " checksum " << matrix_checksum(m.h2d.matrix) << "\n";
  log << "potential channels: " << m.channels.rank() << (m.channels.sector_split ? " (sector split)" : "")
      << ", reconstruction error " << fmt("%.3e", m.channels.reconstruction_error) << "\n";
  for (const ModeModel* mm : {&m.x1, &m.x2})
    log << mm->name << ": offdiag residual " << fmt("%.3e", mm->dec.offdiag_residual) << "\n";
  write_file(dir / "build.log", log.str());
  write_file(dir / "manifest.json",
             json{{"h2d_checksum", matrix_checksum(m.h2d.matrix)},
                  {"x1_checksum", matrix_checksum(m.x1.h)},
                  {"x2_checksum", matrix_checksum(m.x2.h)},
                  {"x1_grid_bohr", vec_json(m.x1.grid.points)},
                  {"x2_grid_rad", vec_json(m.x2.grid.points)},
                  {"symmetric", m.pes.symmetric},
                  {"channels", m.channels.rank()},
                  {"family_sizes", {m.family1.size(), m.family2.size()}},
                  {"offdiag_residual", {{"x1", m.x1.dec.offdiag_residual}, {"x2", m.x2.dec.offdiag_residual}}}}
                     .dump(1) + "\n");
  return "build: " + std::to_string(ev.size()) + " exact levels, " + std::to_string(m.family1.size()) + "+" +
         std::to_string(m.family2.size()) + " effective Hamiltonians, offdiag residual " +
         fmt("%.1e", std::max(m.x1.dec.offdiag_residual, m.x2.dec.offdiag_residual));
}

std::string cmd_factorize(const PipelineConfig& cfg) {
  const Model m = checked_model(cfg);
  const fs::path dir = fs::path(cfg.outdir) / "channels";
  json chans = json::array();
  for (const auto& c : m.channels.channels)
    chans.push_back({{"singular_value", c.singular_value},
                     {"parity", c.parity},
                     {"veff1_hartree", vec_json(c.p1.veff)},
                     {"veff2_hartree", vec_json(c.p2.veff)},
                     {"log_amp1", vec_json(c.p1.log_amp)},
                     {"log_amp2", vec_json(c.p2.log_amp)}});
  write_file(dir / "channels.json", json{{"dt_fs", m.channels.dt_fs},
                                          {"tol", m.channels.tol},
                                          {"rank", m.channels.rank()},
                                          {"sector_split", m.channels.sector_split},
                                          {"reconstruction_error", m.channels.reconstruction_error},
                                          {"max_log_amp_deviation", m.channels.max_log_amp_deviation},
                                          {"channels", chans}}
                                        .dump(1) + "\n");
  for (const ModeModel* mm : {&m.x1, &m.x2}) {
    write_file(dir / (mm->name + "_blocks.json"),
               json{{"checksum", matrix_checksum(mm->h)},
                    {"offdiag_residual", mm->dec.offdiag_residual},
                    {"upper", matrix_to_json(mm->dec.upper)},
                    {"lower", matrix_to_json(mm->dec.lower)},
                    {"upper_eigenvalues_hartree", vec_json(eigenvalues(mm->dec.upper))},
                    {"lower_eigenvalues_hartree", vec_json(eigenvalues(mm->dec.lower))},
                    {"shuffled", matrix_to_json(mm->shuffled_h)}}
                   .dump(1) + "\n");
  }
  write_file(dir / "basis_map.csv", shuffled_basis_map(m.x1.grid.n).to_csv());

  // split-operator check of the channel expansion against the dense surface
  const int n1 = m.x1.grid.n, n2 = m.x2.grid.n;
  CMat psi(n1, n2);
  for (int i = 0; i < n1; ++i)
    for (int j = 0; j < n2; ++j) psi(i, j) = std::exp(-0.5 * std::pow(i - 2.0, 2) - 0.5 * std::pow(j - 4.5, 2));
  psi /= psi.norm();
  const double dt = cfg.channel_dt_fs;
  const CMat kp1 = kinetic_propagator(m.x1.kinetic, dt), kp2 = kinetic_propagator(m.x2.kinetic, dt);
  CMat dense = psi, mps = psi;
  for (int s = 0; s < 100; ++s) {
    dense = dense_trotter_step(dense, m.pes.values, kp1, kp2, dt);
    mps = propagate_mps_step(schmidt_decompose(mps, 1e-14), m.channels, kp1, kp2);
  }
  const double overlap = std::abs((dense.conjugate().cwiseProduct(mps)).sum());
  write_file(dir / "mps_check.json", json{{"steps", 100}, {"dt_fs", dt}, {"overlap", overlap}}.dump(1) + "\n");
  return "factorize: " + std::to_string(m.channels.rank()) + " channels, 100-step overlap " + fmt("%.12f", overlap);
}

std::string cmd_compile(const PipelineConfig& cfg) {
  const Model m = checked_model(cfg);
  for (const ModeModel* mm : {&m.x1, &m.x2}) {
    const json b = read_json(fs::path(cfg.outdir) / "channels" / (mm->name + "_blocks.json"), "factorize");
    if (b.value("checksum", "") != matrix_checksum(mm->h))
      throw IncompleteError("channel artifacts are stale; rerun `qvib factorize`");
  }
  const CircuitBank bank = compile_all(m);
  const fs::path dir = fs::path(cfg.outdir) / "circuits";
  json man = json::object();
  int total = 0, max_cx = 0;
  for (const auto& [key, circs] : bank) {
    json sums = json::array();
    int mx = 0;
    for (const auto& c : circs) {
      std::ostringstream o;
      write_circuit_jsonl(o, c);
      char name[32];
      std::snprintf(name, sizeof name, "t%04d.jsonl", c.time_index);
      write_file(dir / key / name, o.str());
      sums.push_back(c.target_checksum);
      mx = std::max(mx, c.cnot_count());
    }
    man[key] = {{"circuits", circs.size()}, {"width", circs.front().width}, {"max_cnots", mx}, {"checksums", sums}};
    total += static_cast<int>(circs.size());
    max_cx = std::max(max_cx, mx);
  }
  write_file(dir / "manifest.json", man.dump(1) + "\n");
  return "compile: " + std::to_string(total) + " circuits, at most " + std::to_string(max_cx) + " CNOTs";
}

namespace {

CircuitBank load_bank(const PipelineConfig& cfg) {
  const fs::path dir = fs::path(cfg.outdir) / "circuits";
  const json man = read_json(dir / "manifest.json", "compile");
  CircuitBank bank;
  for (const auto& [key, info] : man.items()) {
    const auto sums = info.at("checksums");
    std::vector<Circuit> v;
    for (std::size_t k = 0; k < sums.size(); ++k) {
      char name[32];
      std::snprintf(name, sizeof name, "t%04zu.jsonl", k);
      std::ifstream f(dir / key / name);
      if (!f) throw IncompleteError("missing circuit " + (dir / key / name).string() + "; rerun `qvib compile`");
      Circuit c = read_circuit_jsonl(f);
      if (c.target_checksum != sums[k].get<std::string>())
        throw IncompleteError("circuit " + (dir / key / name).string() + " does not match the manifest");
      v.push_back(std::move(c));
    }
    bank[key] = std::move(v);
  }
  return bank;
}

json run_options_json(const PipelineConfig& cfg, const ExecOptions& opt) {
  return {{"seed", opt.global_seed}, {"shots", cfg.shots}, {"noise", opt.noise.p}, {"statevector", opt.statevector}};
}

}  // namespace

std::string cmd_run(const PipelineConfig& cfg, const ExecOptions& opt) {
  const Model m = checked_model(cfg);
  const CircuitBank bank = load_bank(cfg);
  const fs::path dir = fs::path(cfg.outdir) / "results";
  fs::create_directories(dir);
  const json want = run_options_json(cfg, opt);
  const fs::path optp = dir / "options.json";
  if (fs::exists(optp)) {
    const json have = read_json(optp, "run");
    if (have != want)
      throw ParseError("results store " + dir.string() + " was produced with options " + have.dump() +
                       "; use a fresh output directory for " + want.dump());
  } else {
    write_file(optp, want.dump(1) + "\n");
  }
  ResultsStore store(dir.string());
  std::vector<JobSpec> pending;
  const auto jobs = schedule_jobs(cfg);
  for (const auto& j : jobs)
    if (!store.contains(j.key())) pending.push_back(j);
  const auto out = run_schedule(
      pending,
      [&](const JobSpec& j) {
        const auto it = bank.find(run_key(j.hamiltonian, j.block));
        if (it == bank.end() || j.time_index >= static_cast<int>(it->second.size()))
          throw IncompleteError("no compiled circuit for " + j.key());
        return job_circuit(m.mode(j.hamiltonian), j, it->second[j.time_index]);
      },
      opt);
  int failed = 0;
  for (const auto& [k, r] : out) {
    store.put(r);
    failed += r.status != "ok";
  }
  store.write_index();
  const std::string summary = "run: " + std::to_string(pending.size()) + " executed, " +
                              std::to_string(jobs.size() - pending.size()) + " already present, " +
                              std::to_string(failed) + " failed";
  if (failed) throw IncompleteError(summary + "; rerun to retry the failed jobs");
  return summary;
}

namespace {

void write_trace_csv(std::ostream& o, const TimeTrace& t) {
  o << "time_fs";
  for (int x = 0; x < t.n_points(); ++x) o << ",p" << x;
  o << "\n";
  o.precision(12);
  for (int k = 0; k < t.n_times(); ++k) {
    o << k * t.schedule.dt_fs;
    for (int x = 0; x < t.n_points(); ++x) o << ',' << t.density(k, x);
    o << "\n";
  }
}

}  // namespace

std::string cmd_analyze(const PipelineConfig& cfg) {
  const fs::path rdir = fs::path(cfg.outdir) / "results";
  if (!fs::exists(rdir) || ResultsStore(rdir.string()).keys().empty())
    throw IncompleteError("results store " + rdir.string() + " is empty; run `qvib run` first");
  const Model m = checked_model(cfg);
  ResultsStore store(rdir.string());
  std::map<std::string, JobResult> results;
  std::vector<std::string> missing;
  for (const auto& j : schedule_jobs(cfg)) {
    if (!store.contains(j.key())) {
      missing.push_back(j.key());
      continue;
    }
    results.emplace(j.key(), store.get(j.key()));
  }
  if (!missing.empty()) {
    std::string msg = "results store is missing " + std::to_string(missing.size()) + " job(s):";
    for (std::size_t i = 0; i < missing.size() && i < 10; ++i) msg += " " + missing[i];
    if (missing.size() > 10) msg += " ...";
    throw IncompleteError(msg + "; rerun `qvib run`");
  }
  const Analysis a = analyze(cfg, m, results);

  const fs::path dir = fs::path(cfg.outdir) / "spectra";
  json traces = json::array();
  for (const auto& t : a.traces) {
    std::ostringstream tc, sc;
    write_trace_csv(tc, t.quantum);
    write_spectrum_csv(sc, t.spectrum);
    write_file(dir / "traces" / (t.quantum.label + ".csv"), tc.str());
    write_file(dir / "per_state" / (t.quantum.label + ".csv"), sc.str());
    traces.push_back({{"mode", t.mode}, {"run", t.run}, {"grid_label", t.grid_label}, {"wavepacket_error", t.wavepacket_error}});
  }
  json runs = json::array();
  for (const auto& r : a.runs) {
    std::ostringstream sc;
    write_spectrum_csv(sc, r.cumulative);
    write_file(dir / "cumulative" / (run_key(r.mode, r.run) + ".csv"), sc.str());
    json pk = json::array();
    for (const auto& p : r.peaks) pk.push_back({{"thz", p.freq_thz}, {"height", p.height}});
    runs.push_back({{"mode", r.mode},
                    {"run", r.run},
                    {"bin_width_thz", r.bin_width_thz},
                    {"peaks", pk},
                    {"max_peak_gap_dev_thz", r.max_peak_gap_dev_thz},
                    {"upper_bound", r.cumulative.upper_bound},
                    {"max_power", r.cumulative.power.maxCoeff()},
                    {"sources", r.cumulative.provenance}});
  }
  json ladders = json::object();
  for (const auto& [mode, l] : a.ladders) {
    json j = ladder_to_json(l);
    const Vec ex = eigenvalues(m.mode(mode).h);
    Vec rel(ex.size());
    for (Eigen::Index i = 0; i < ex.size(); ++i) rel(i) = units::hartree_to_thz(ex(i) - ex(0));
    j["exact_thz"] = vec_json(rel);
    if (a.mode_mae_kcal.count(mode)) j["mae_kcal_mol"] = a.mode_mae_kcal.at(mode);
    write_file(dir / ("ladder_" + mode + ".json"), j.dump(1) + "\n");
    ladders[mode] = j;
  }
  json doc = {{"traces", traces}, {"runs", runs}, {"ladders", ladders},
              {"max_wavepacket_error", a.max_wavepacket_error}, {"mae_levels", std::min<int>(cfg.mae_levels, a.combined_thz.size())},
              {"mae_kcal_mol", a.mae_kcal}, {"combined_thz", vec_json(a.combined_thz)}};
  write_file(dir / "analysis.json", doc.dump(1) + "\n");
  return "analyze: " + std::to_string(a.traces.size()) + " traces, max wavepacket error " +
         fmt("%.3e", a.max_wavepacket_error) + ", 2-D ladder MAE " + fmt("%.4f", a.mae_kcal) + " kcal/mol";
}

std::string cmd_report(const PipelineConfig& cfg) {
  const fs::path out = cfg.outdir;
  const json an = read_json(out / "spectra" / "analysis.json", "analyze");
  const json build = read_json(out / "hamiltonians" / "manifest.json", "build");
  const json circ = read_json(out / "circuits" / "manifest.json", "compile");
  const json ropt = read_json(out / "results" / "options.json", "run");

  std::ostringstream md;
  md << "# qvib report\n\n## Sampling schedules\n\n"
     << "| run | dt (fs) | T (fs) | N_t | d_omega (THz) | omega_max (THz) |\n|---|---|---|---|---|---|\n";
  json sched = json::array();
  for (const ModeSpec* ms : {&cfg.x1, &cfg.x2})
    for (auto [label, s] : {std::pair{"blocks", &ms->block}, std::pair{"full", &ms->full}}) {
      md << "| " << ms->name << " " << label << " | " << fmt("%.2f", s->dt_fs) << " | " << fmt("%.0f", s->total_fs)
         << " | " << s->n_steps() << " | " << fmt("%.3f", s->d_omega_thz()) << " | " << fmt("%.1f", s->omega_max_thz())
         << " |\n";
      sched.push_back({{"run", ms->name + "_" + label}, {"dt_fs", s->dt_fs}, {"total_fs", s->total_fs},
                       {"d_omega_thz", s->d_omega_thz()}, {"omega_max_thz", s->omega_max_thz()}});
    }
  md << "\n## Model\n\n- off-diagonal block residual: x1 " << fmt("%.2e", build["offdiag_residual"]["x1"].get<double>())
     << ", x2 " << fmt("%.2e", build["offdiag_residual"]["x2"].get<double>()) << "\n- potential channels: "
     << build["channels"].get<int>() << "\n\n## Circuits\n\n| run | circuits | width | max CNOTs |\n|---|---|---|---|\n";
  for (const auto& [k, v] : circ.items())
    md << "| " << k << " | " << v["circuits"].get<int>() << " | " << v["width"].get<int>() << " | "
       << v["max_cnots"].get<int>() << " |\n";
  md << "\n## Execution\n\n- options: " << ropt.dump() << "\n\n## Wavepacket error\n\n| mode | run | state | dPsi |\n|---|---|---|---|\n";
  for (const auto& t : an["traces"])
    md << "| " << t["mode"].get<std::string>() << " | " << t["run"].get<std::string>() << " | g"
       << t["grid_label"].get<int>() << " | " << fmt("%.3e", t["wavepacket_error"].get<double>()) << " |\n";
  md << "\n## Energy ladders (THz above ground)\n\n";
  for (const auto& [mode, l] : an["ladders"].items()) {
    md << "### " << mode;
    if (l.contains("mae_kcal_mol")) md << " (MAE " << fmt("%.4f", l["mae_kcal_mol"].get<double>()) << " kcal/mol)";
    md << "\n\n| level | reconstructed | exact | source |\n|---|---|---|---|\n";
    const auto& lv = l["levels"];
    const auto& ex = l["exact_thz"];
    for (std::size_t i = 0; i < lv.size(); ++i)
      md << "| " << i << " | " << fmt("%.3f", lv[i]["thz"].get<double>()) << " | "
         << (i < ex.size() ? fmt("%.3f", ex[i].get<double>()) : std::string("-")) << " | "
         << lv[i]["provenance"].get<std::string>() << " |\n";
    md << "\n";
  }
  md << "## 2-D ladder\n\nMAE over the lowest " << an["mae_levels"].get<int>()
     << " levels vs exact diagonalization: " << fmt("%.4f", an["mae_kcal_mol"].get<double>()) << " kcal/mol\n";
  write_file(out / "report" / "report.md", md.str());
  write_file(out / "report" / "summary.json",
             json{{"schedules", sched},
                  {"mae_kcal_mol", an["mae_kcal_mol"]},
                  {"max_wavepacket_error", an["max_wavepacket_error"]},
                  {"run_options", ropt}}
                     .dump(1) + "\n");
  return "report: " + (out / "report" / "report.md").string();
}

}  // namespace qvib
