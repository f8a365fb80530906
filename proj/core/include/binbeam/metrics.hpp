// Copyright 2026 The binbeam Authors. All Rights Reserved.
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

#include <string>
#include <vector>

#include "binbeam/beamformer.hpp"
#include "binbeam/linalg.hpp"
#include "binbeam/scene.hpp"
#include "binbeam/wola.hpp"

namespace binbeam {

struct BinauralRatios {
  double snr_db = 0.0;
  double sir_db = 0.0;
  double sinr_db = 0.0;
};

// Binaural output ratios for one bin: each ratio sums the left and right
// output PSDs of the desired component against the respective undesired
// component (noise for SNR, interference for SIR, both for SINR).
BinauralRatios binaural_ratios(const HermitianMatrix& r_desired,
                               const HermitianMatrix& r_interference,
                               const HermitianMatrix& r_noise,
                               const HermitianMatrix& r_undesired, const BeamformerPair& w);

// Input ratios, i.e. the pass-through selectors e_L / e_R as the filter pair.
BinauralRatios input_ratios(const HermitianMatrix& r_desired,
                            const HermitianMatrix& r_interference,
                            const HermitianMatrix& r_noise, const HermitianMatrix& r_undesired,
                            std::size_t mics_per_device);

BeamformerPair selector_pair(std::size_t channels, std::size_t mics_per_device);

struct CueErrors {
  double ild_db = 0.0;
  double itd_us = 0.0;
  std::size_t skipped_bins = 0;
};

// Interaural transfer-ratio cue errors of one interferer against its true
// ATFs: H_out = (w_L^H b) / (w_R^H b) versus H_in = B_L / B_R. The ILD error
// averages |level difference| over all usable bins, the ITD error the
// principal-value phase difference over 2 pi f for bins below itd_band_hz.
CueErrors cue_errors(const std::vector<BeamformerPair>& filters,
                     const std::vector<ComplexVector>& interferer_atf, const WolaConfig& cfg,
                     std::size_t mics_per_device, double itd_band_hz = 1500.0);

// Broadband metrics of one (scenario, beamformer, R choice, interval) cell.
// Broadband values are arithmetic means over bins of the per-bin dB values;
// improvements are out minus in.
struct MetricsReport {
  std::string scenario;
  std::string beamformer;
  std::string r_choice;
  std::string delta_mode;
  double interval_s = 0.0;

  double snr_in_db = 0.0;
  double snr_out_db = 0.0;
  double sir_in_db = 0.0;
  double sir_out_db = 0.0;
  double sinr_in_db = 0.0;
  double sinr_out_db = 0.0;

  // Cue errors per interferer.
  std::vector<double> ild_error_db;
  std::vector<double> itd_error_us;

  double snr_improvement_db() const { return snr_out_db - snr_in_db; }
  double sir_improvement_db() const { return sir_out_db - sir_in_db; }
  double sinr_improvement_db() const { return sinr_out_db - sinr_in_db; }

  static std::string csv_header();
  // One row per cell; cue columns carry the first interferer.
  std::string csv_row() const;
};

// Broadband report from true per-bin component matrices (scene model) and a
// full-band filter.
MetricsReport evaluate_filters(const SceneModel& model,
                               const std::vector<BeamformerPair>& filters);

}  // namespace binbeam
