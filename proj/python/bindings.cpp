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


// Python bindings: the numerical kernels plus the staged pipeline.
#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "qvib/blocks.hpp"
#include "qvib/circuit.hpp"
#include "qvib/config.hpp"
#include "qvib/errors.hpp"
#include "qvib/factorize.hpp"
#include "qvib/grid.hpp"
#include "qvib/pipeline.hpp"
#include "qvib/qsim.hpp"
#include "qvib/spectral.hpp"

namespace py = pybind11;
using namespace qvib;

namespace {

ExecOptions exec_options(const PipelineConfig& c) {
  ExecOptions o;
  o.workers = c.workers;
  o.global_seed = c.seed;
  o.statevector = c.statevector;
  o.noise.p = c.noise;
  return o;
}

PipelineConfig config_from_text(const std::string& text) {
  std::istringstream in(text);
  return parse_config(in, "<string>");
}

}  // namespace

PYBIND11_MODULE(_qvib, m) {
  m.doc() = "block-encoded vibrational dynamics: grids, channels, circuits, simulation, spectra";

  py::register_exception<DomainError>(m, "DomainError", PyExc_ValueError);
  py::register_exception<ParseError>(m, "ParseError", PyExc_RuntimeError);
  py::register_exception<IncompleteError>(m, "IncompleteError", PyExc_RuntimeError);

  // ---- schedules and grids
  py::class_<SimulationSchedule>(m, "SimulationSchedule")
      .def(py::init([](double dt, double total) { return SimulationSchedule{dt, total}; }), py::arg("dt_fs"),
           py::arg("total_fs"))
      .def_readwrite("dt_fs", &SimulationSchedule::dt_fs)
      .def_readwrite("total_fs", &SimulationSchedule::total_fs)
      .def_property_readonly("n_steps", &SimulationSchedule::n_steps)
      .def_property_readonly("d_omega_thz", &SimulationSchedule::d_omega_thz)
      .def_property_readonly("omega_max_thz", &SimulationSchedule::omega_max_thz)
      .def_property_readonly("bin_width_thz", &SimulationSchedule::bin_width_thz);

  py::class_<Grid1D>(m, "Grid1D")
      .def_readonly("points", &Grid1D::points)
      .def_readonly("n", &Grid1D::n)
      .def_readonly("qubits", &Grid1D::qubits)
      .def_readonly("spacing", &Grid1D::spacing);
  m.def("build_grid", &build_grid, py::arg("n"), py::arg("extent"));
  m.def("build_grid_range", &build_grid_range, py::arg("n"), py::arg("lo"), py::arg("hi"));
  m.def(
      "daf_kinetic",
      [](const Grid1D& g, double mass, double sigma_ratio, int m_daf) {
        return daf_kinetic(g, default_daf(g, mass, sigma_ratio, m_daf));
      },
      py::arg("grid"), py::arg("mass"), py::arg("sigma_ratio") = 1.5, py::arg("m_daf") = 20,
      "DAF kinetic matrix; mass in electron masses, grid in bohr or radians");
  m.def("assemble_h2d", [](const Mat& k1, const Mat& k2, const Mat& v) { return assemble_h2d(k1, k2, v).matrix; });
  m.def(
      "exact_eigensolve",
      [](const Mat& h) {
        const auto e = exact_eigensolve(h);
        return py::make_tuple(e.eigenvalues, e.eigenvectors);
      },
      py::arg("h"));

  py::class_<TimeTrace>(m, "TimeTrace")
      .def(py::init([](const Mat& d, const SimulationSchedule& s, const std::string& label) {
             return TimeTrace{d, s, label};
           }),
           py::arg("density"), py::arg("schedule"), py::arg("label") = "")
      .def_readonly("density", &TimeTrace::density)
      .def_readonly("schedule", &TimeTrace::schedule)
      .def_readonly("label", &TimeTrace::label);
  m.def("classical_propagate", &classical_propagate, py::arg("h"), py::arg("psi0"), py::arg("schedule"));

  // ---- factorization and blocks
  m.def(
      "schmidt_decompose",
      [](const CMat& psi, double tol) {
        const auto w = schmidt_decompose(psi, tol);
        return py::make_tuple(w.weights, w.left, w.right);
      },
      py::arg("psi"), py::arg("tol"));
  m.def(
      "givens_transform",
      [](const Mat& h) {
        const auto d = givens_transform(h);
        return py::dict(py::arg("h_tilde") = d.h_tilde, py::arg("upper") = d.upper, py::arg("lower") = d.lower,
                        py::arg("offdiag_residual") = d.offdiag_residual);
      },
      py::arg("h"));
  m.def("givens_matrix", &givens_matrix, py::arg("n"));
  m.def("readout_permutation", &readout_permutation, py::arg("n"));
  m.def("basis_map_csv", [](int n) { return shuffled_basis_map(n).to_csv(); }, py::arg("n"));

  // ---- circuits
  py::enum_<GateKind>(m, "GateKind")
      .value("Rz", GateKind::Rz)
      .value("SqrtX", GateKind::SqrtX)
      .value("H", GateKind::H)
      .value("CNOT", GateKind::CNOT);
  py::class_<Gate>(m, "Gate")
      .def_readonly("kind", &Gate::kind)
      .def_readonly("q0", &Gate::q0)
      .def_readonly("q1", &Gate::q1)
      .def_readonly("angle", &Gate::angle);
  py::class_<Circuit>(m, "Circuit")
      .def_readonly("width", &Circuit::width)
      .def_readonly("gates", &Circuit::gates)
      .def_property_readonly("cnot_count", &Circuit::cnot_count)
      .def("unitary", &circuit_unitary)
      .def("to_jsonl", [](const Circuit& c) {
        std::ostringstream o;
        write_circuit_jsonl(o, c);
        return o.str();
      });
  m.def("kak_compile", &kak_compile, py::arg("u"));
  m.def("compile_diagonal", &compile_diagonal, py::arg("d"));
  m.def("compile_block_diagonal", &compile_block_diagonal, py::arg("u0"), py::arg("u1"));
  m.def("phase_aligned_distance", &phase_aligned_distance, py::arg("a"), py::arg("b"));
  m.def("evolution_operator", &evolution_operator, py::arg("h"), py::arg("t_au"));

  // ---- simulation
  m.def(
      "simulate", [](const Circuit& c) { return simulate(c).amp; }, py::arg("circuit"));
  m.def(
      "sample", [](const Vec& p, long shots, std::uint64_t seed) { return sample(p, shots, seed).counts; },
      py::arg("probabilities"), py::arg("shots"), py::arg("seed"));
  m.def(
      "apply_noise", [](const Circuit& c, double p) { return apply_noise(c, NoiseModel{p}); }, py::arg("circuit"),
      py::arg("p"));

  // ---- spectra
  py::class_<PowerSpectrum>(m, "PowerSpectrum")
      .def_readonly("freq_thz", &PowerSpectrum::freq_thz)
      .def_readonly("power", &PowerSpectrum::power)
      .def_readonly("upper_bound", &PowerSpectrum::upper_bound);
  py::class_<Peak>(m, "Peak")
      .def(py::init([](double f, double h) { return Peak{f, h}; }), py::arg("freq_thz"), py::arg("height") = 1.0)
      .def_readonly("freq_thz", &Peak::freq_thz)
      .def_readonly("height", &Peak::height)
      .def("__repr__", [](const Peak& p) { return "Peak(" + std::to_string(p.freq_thz) + ")"; });
  m.def(
      "power_spectrum",
      [](const TimeTrace& t, bool remove_dc) { return power_spectrum(trace_fft(t, remove_dc), t.label); },
      py::arg("trace"), py::arg("remove_dc") = true);
  m.def("cumulate", &cumulate, py::arg("spectra"));
  m.def(
      "detect_peaks",
      [](const PowerSpectrum& p, double floor) {
        PeakOptions o;
        o.floor = floor;
        return detect_peaks(p, o);
      },
      py::arg("spectrum"), py::arg("floor") = 0.02);
  m.def(
      "turnpike", [](const std::vector<Peak>& p, int n, double tol) { return turnpike(p, n, tol).thz(); },
      py::arg("peaks"), py::arg("n_levels"), py::arg("tol"));
  m.def("ladder_mae", &ladder_mae, py::arg("recon_thz"), py::arg("exact_hartree"), py::arg("k"));
  m.def("wavepacket_error", &wavepacket_error, py::arg("quantum"), py::arg("classical"));

  // ---- pipeline
  py::class_<PipelineConfig>(m, "PipelineConfig")
      .def(py::init(&PipelineConfig::defaults))
      .def_static("from_toml", &config_from_text, py::arg("text"))
      .def_static("load", &load_config, py::arg("path"))
      .def("to_toml", &config_to_toml)
      .def("validate", &PipelineConfig::validate)
      .def_readwrite("outdir", &PipelineConfig::outdir)
      .def_readwrite("shots", &PipelineConfig::shots)
      .def_readwrite("noise", &PipelineConfig::noise)
      .def_readwrite("seed", &PipelineConfig::seed)
      .def_readwrite("workers", &PipelineConfig::workers)
      .def_readwrite("statevector", &PipelineConfig::statevector)
      .def_readwrite("pes_file", &PipelineConfig::pes_file)
      .def_readwrite("peak_floor", &PipelineConfig::peak_floor)
      .def_readwrite("mae_levels", &PipelineConfig::mae_levels);

  const auto release = py::call_guard<py::gil_scoped_release>();
  m.def("cmd_build", &cmd_build, release);
  m.def("cmd_factorize", &cmd_factorize, release);
  m.def("cmd_compile", &cmd_compile, release);
  m.def("cmd_run", [](const PipelineConfig& c) { return cmd_run(c, exec_options(c)); }, release);
  m.def("cmd_analyze", &cmd_analyze, release);
  m.def("cmd_report", &cmd_report, release);
  m.def(
      "run_in_memory",
      [](const PipelineConfig& c) {
        py::gil_scoped_release nogil;
        const Model model = build_model(c);
        const auto results = execute_all(c, model, compile_all(model), exec_options(c));
        const Analysis a = analyze(c, model, results);
        std::map<std::string, double> errors;
        for (const auto& t : a.traces) errors[t.quantum.label] = t.wavepacket_error;
        std::map<std::string, Vec> ladders;
        for (const auto& [k, l] : a.ladders) ladders[k] = l.thz();
        return std::make_tuple(a.mae_kcal, errors, ladders, canonical_results(results));
      },
      py::arg("config"), "Whole pipeline without touching disk: (mae_kcal, wavepacket errors, ladders, results json)");
}
