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
#include <string>
#include <vector>

#include <json.hpp>

#include "qvib/grid.hpp"
#include "qvib/linalg.hpp"
#include "qvib/trace.hpp"

namespace qvib {

// I(w; x) on the full zero-padded axis: rows = 2 N_t bins, cols = grid points.
struct SpectralDensity {
  CMat values;
  double bin_width_thz = 0.0;
  int n_steps = 0;
  bool dc_removed = true;
  // per-point sum_t |rho - mean| (or sum_t rho), the Cauchy-Schwarz bound on |I|
  Vec bound;
};

SpectralDensity trace_fft(const TimeTrace& tr, bool remove_dc = true);

// One-sided spectrum on bins 0..N_t.
struct PowerSpectrum {
  Vec freq_thz;
  Vec power;
  std::vector<std::string> provenance;
  double upper_bound = 0.0;  // n (N_t+1)^2, summed over cumulated inputs
};

PowerSpectrum power_spectrum(const SpectralDensity& s, const std::string& label = "");
PowerSpectrum cumulate(const std::vector<PowerSpectrum>& spectra);

struct Peak {
  double freq_thz = 0.0;
  double height = 0.0;
};

struct PeakOptions {
  double floor = 0.02;           // relative to the off-DC maximum
  // a local maximum within `sidelobe_bins` of a line more than 1/sidelobe_ratio
  // times stronger is treated as window leakage (rectangular-window sidelobes
  // sit at ~4.7%, 1.6%, 0.8% of the parent line, more where two lines
  // interfere); ratio 0 disables
  double sidelobe_ratio = 0.125;
  int sidelobe_bins = 8;
};

std::vector<Peak> detect_peaks(const PowerSpectrum& p, const PeakOptions& opt = {});

struct LadderLevel {
  double thz = 0.0;
  std::string provenance;  // upper | lower | single
};

struct EnergyLadder {
  std::vector<LadderLevel> levels;  // ascending, ground = 0
  double residual = 0.0;            // height-weighted peak assignment residual (THz)
  std::vector<double> unmatched_peaks;
  std::vector<int> mirror;          // per-block mirror choice made during anchoring
  double block_offset_thz = 0.0;    // lower-block ground minus upper-block ground

  Vec thz() const;
  Vec kcal() const;
};

// Levels (ground at 0) whose pairwise gaps explain `peaks`. n_levels = 0 infers
// it from the peak count (n(n-1)/2 gaps). Ties resolve to the lexicographically
// smaller ladder.
EnergyLadder turnpike(const std::vector<Peak>& peaks, int n_levels, double tol);

struct BlockPeaks {
  std::string name;  // provenance label
  std::vector<Peak> peaks;
  int n_levels = 4;
  double tol = 0.0;  // gap matching tolerance for this block's spectrum
};

struct FullSpectrumPeaks {
  std::vector<Peak> peaks;
  double omega_max_thz = 0.0;  // Nyquist of the full run; gaps alias into [0, omega_max]
  double bin_width_thz = 0.0;
};

// One or two blocks. With two, the pair is anchored by the full-Hamiltonian spectrum.
EnergyLadder reconstruct_ladder(const std::vector<BlockPeaks>& blocks, const FullSpectrumPeaks& full);

// sorted sums of two 1-D ladders, ground at 0
Vec combine_ladders(const Vec& a, const Vec& b);

// mean |recon - exact| over the first k levels, both shifted to ground 0, in kcal/mol.
// recon in THz, exact in hartree.
double ladder_mae(const Vec& recon_thz, const Vec& exact_hartree, int k);

// sqrt( 1/(N T) sum_t sum_x |rho_c - rho_q|^2 dt ), T the sampled span.
double wavepacket_error(const TimeTrace& quantum, const TimeTrace& classical);

void write_spectrum_csv(std::ostream& out, const PowerSpectrum& p);
nlohmann::json ladder_to_json(const EnergyLadder& l);

}  // namespace qvib
