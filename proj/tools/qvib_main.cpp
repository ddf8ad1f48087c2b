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

// qvib: staged vibrational-spectroscopy pipeline driver.
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "qvib/config.hpp"
#include "qvib/errors.hpp"
#include "qvib/pipeline.hpp"

int main(int argc, char** argv) {
  CLI::App app{"qvib - block-encoded vibrational dynamics pipeline"};
  app.require_subcommand(1);
  std::string config_path;
  std::optional<int> workers;
  std::optional<std::uint64_t> seed;
  std::optional<long> shots;
  std::optional<double> noise;
  std::optional<std::string> outdir;
  bool statevector = false;
  app.add_option("--config", config_path, "TOML-style key/value config (defaults when omitted)");
  app.add_option("--workers", workers, "simulated quantum workers")->check(CLI::PositiveNumber);
  app.add_option("--seed", seed, "global seed");
  app.add_option("--shots", shots, "shots per circuit")->check(CLI::PositiveNumber);
  app.add_option("--noise", noise, "two-qubit depolarizing probability")->check(CLI::Range(0.0, 1.0));
  app.add_option("--outdir", outdir, "output directory (overrides output.dir)");
  app.add_flag("--statevector", statevector, "exact probabilities, no sampling");

  const char* names[][2] = {{"build", "grids, surface, 2-D Hamiltonian, exact ladder, effective Hamiltonians"},
                            {"factorize", "potential channels, Givens blocks, basis map"},
                            {"compile", "evolution circuits per time point"},
                            {"run", "execute jobs into the results store (resumable)"},
                            {"analyze", "spectra, peaks, ladders, errors"},
                            {"report", "markdown and JSON summary"},
                            {"print-config", "print the default configuration"}};
  // global flags may follow the subcommand too
  for (auto& n : names) app.add_subcommand(n[0], n[1])->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    const std::string cmd = app.get_subcommands().front()->get_name();
    qvib::PipelineConfig cfg = config_path.empty() ? qvib::PipelineConfig::defaults() : qvib::load_config(config_path);
    if (workers) cfg.workers = *workers;
    if (seed) cfg.seed = *seed;
    if (shots) cfg.shots = *shots;
    if (noise) cfg.noise = *noise;
    if (outdir) cfg.outdir = *outdir;
    if (statevector) cfg.statevector = true;
    cfg.validate();

    if (cmd == "print-config") {
      std::cout << qvib::config_to_toml(cfg);
      return 0;
    }
    std::string summary;
    if (cmd == "build") summary = qvib::cmd_build(cfg);
    else if (cmd == "factorize") summary = qvib::cmd_factorize(cfg);
    else if (cmd == "compile") summary = qvib::cmd_compile(cfg);
    else if (cmd == "run") {
      qvib::ExecOptions opt;
      opt.workers = cfg.workers;
      opt.global_seed = cfg.seed;
      opt.statevector = cfg.statevector;
      opt.noise.p = cfg.noise;
      summary = qvib::cmd_run(cfg, opt);
    } else if (cmd == "analyze") summary = qvib::cmd_analyze(cfg);
    else if (cmd == "report") summary = qvib::cmd_report(cfg);
    std::cout << summary << "\n";
    return 0;
  } catch (const qvib::ParseError& e) {
    std::cerr << "qvib: " << e.what() << "\n";
    return 2;
  } catch (const qvib::IncompleteError& e) {
    std::cerr << "qvib: " << e.what() << "\n";
    return 3;
  } catch (const qvib::DomainError& e) {
    std::cerr << "qvib: invalid input: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "qvib: internal error: " << e.what() << "\n";
    return 1;
  }
}
