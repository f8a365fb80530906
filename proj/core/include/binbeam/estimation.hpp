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

#include "binbeam/linalg.hpp"
#include "binbeam/scene.hpp"
#include "binbeam/wola.hpp"

namespace binbeam {

// Half-open frame range [begin, end).
struct FrameInterval {
  std::size_t begin = 0;
  std::size_t end = 0;

  std::size_t length() const { return end > begin ? end - begin : 0; }
};

// Per-bin correlation matrices estimated from spectral frames, together with
// the frame counts they were averaged over.
struct CorrelationSet {
  std::size_t dim = 0;
  std::vector<HermitianMatrix> noise;                               // R_n
  std::vector<HermitianMatrix> mixture;                             // R_y
  std::vector<HermitianMatrix> undesired;                           // R_v
  std::vector<HermitianMatrix> desired_plus_noise;                  // R_xn
  std::vector<std::vector<HermitianMatrix>> interferer_plus_noise;  // [p][bin]
  std::size_t noise_frames = 0;
  std::size_t observation_frames = 0;

  std::size_t bin_count() const { return noise.size(); }
  std::size_t interferer_count() const { return interferer_plus_noise.size(); }

  std::string to_json() const;
  static CorrelationSet from_json(const std::string& text);
};

// Reference-normalized RTF vectors per bin: entry 0 is exactly 1 in the left
// vectors, entry M in the right ones.
struct RtfEstimate {
  std::size_t mics_per_device = 0;
  std::vector<ComplexVector> desired_left;                   // [bin]
  std::vector<ComplexVector> desired_right;                  // [bin]
  std::vector<std::vector<ComplexVector>> interferer_left;   // [p][bin]
  std::vector<std::vector<ComplexVector>> interferer_right;  // [p][bin]

  std::size_t bin_count() const { return desired_left.size(); }
  std::size_t interferer_count() const { return interferer_left.size(); }

  std::string to_json() const;
  static RtfEstimate from_json(const std::string& text);
};

// (1 / T) sum_t y(t) y(t)^H at one bin over the given frame range,
// symmetrized after accumulation.
HermitianMatrix estimate_correlation(const std::vector<SpectralFrame>& frames, std::size_t bin,
                                     FrameInterval interval);

struct RtfGevdResult {
  ComplexVector left;
  ComplexVector right;
  double eigenvalue = 0.0;
  // False when the principal generalized eigenvalue stays below 1 + 1e-6,
  // i.e. the source-plus-noise matrix carries no source.
  bool source_detected = true;
};

// Covariance whitening: principal generalized eigenvector x of (R_sn, R_n),
// back-projected through the noise matrix (a ~ R_n x), then normalized by
// the reference entries. ref_right is the right reference channel index M.
RtfGevdResult estimate_rtf_gevd(const HermitianMatrix& r_sn, const HermitianMatrix& r_n,
                                std::size_t ref_right);

struct EstimationResult {
  CorrelationSet correlations;
  RtfEstimate rtfs;
  FrameInterval noise_interval;
  FrameInterval observation_interval;
};

// Spectral analyses of the mixture and the component-oracle mixtures
// (undesired, desired+noise, each interferer+noise). Computing these once
// lets several observation intervals reuse the same transforms.
struct AnalyzedTimeline {
  std::vector<SpectralFrame> mixture;
  std::vector<SpectralFrame> undesired;
  std::vector<SpectralFrame> desired_plus_noise;
  std::vector<std::vector<SpectralFrame>> interferer_plus_noise;
  std::size_t noise_only_samples = 0;

  static AnalyzedTimeline from(const SignalTimeline& timeline, const WolaConfig& cfg);
};

// Estimation from pre-analyzed streams: R_n from the noise-only prefix,
// R_y / R_v / R_xn / R_v,p over an observation interval of observation_s
// seconds starting at the end of the prefix, then every RTF by covariance
// whitening against R_n.
EstimationResult estimate_from_analyzed(const AnalyzedTimeline& analyzed, const WolaConfig& cfg,
                                        std::size_t mics_per_device, double observation_s);

// Convenience wrapper: analyze the timeline, then estimate.
EstimationResult build_correlation_set(const SignalTimeline& timeline, const WolaConfig& cfg,
                                       std::size_t mics_per_device, double observation_s);

// Frame range of the noise-only prefix (frames fully inside it).
FrameInterval noise_prefix_interval(const SignalTimeline& timeline, const WolaConfig& cfg);

// Observation interval of length seconds starting at the first frame at or
// after the noise prefix: T_L = floor(seconds * fs / hop) frames.
FrameInterval observation_interval(const SignalTimeline& timeline, const WolaConfig& cfg,
                                   double seconds);

}  // namespace binbeam
