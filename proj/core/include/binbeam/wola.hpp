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

#include <cstddef>
#include <vector>

#include "binbeam/beamformer.hpp"
#include "binbeam/linalg.hpp"

namespace binbeam {

// Multichannel time signal, one sample vector per channel. Channel order for
// binaural material is [L1..LM, R1..RM].
using SampleStream = std::vector<std::vector<double>>;

// Weighted overlap-add filterbank configuration. Analysis and synthesis both
// use the square-root periodic Hann window, which satisfies constant
// overlap-add at 50% hop.
struct WolaConfig {
  std::size_t block_length = 256;
  double overlap = 0.5;
  int sample_rate = 16000;

  void validate() const;
  std::size_t hop() const;
  std::size_t bin_count() const { return block_length / 2 + 1; }
  double bin_frequency_hz(std::size_t bin) const;
  std::vector<double> window() const;
  // Frames produced by analyze() for a signal of the given length.
  std::size_t frame_count(std::size_t samples) const;
  std::size_t seconds_to_samples(double seconds) const;
};

// One windowed block of the input, all channels.
struct MultichannelFrame {
  std::size_t frame_index = 0;
  std::vector<std::vector<double>> channels;  // [channel][block_length]
};

// One-sided spectrum of one frame: bins[k] stacks all channels at bin k.
struct SpectralFrame {
  std::size_t frame_index = 0;
  std::vector<ComplexVector> bins;  // [bin][channel]
};

MultichannelFrame extract_frame(const SampleStream& signal, const WolaConfig& cfg,
                                std::size_t frame_index);

// Windowed one-sided transforms of every frame.
std::vector<SpectralFrame> analyze(const SampleStream& signal, const WolaConfig& cfg);

// Inverse transform, synthesis window and overlap-add; exact inverse of
// analyze() on the fully overlapped interior.
SampleStream synthesize(const std::vector<SpectralFrame>& frames, const WolaConfig& cfg);

// Z_L(t, k) = w_L(k)^H y(t, k), Z_R(t, k) = w_R(k)^H y(t, k) with one fixed
// filter pair per bin. Output frames carry two channels [Z_L, Z_R].
std::vector<SpectralFrame> apply_filter(const std::vector<SpectralFrame>& frames,
                                        const std::vector<BeamformerPair>& filter);

}  // namespace binbeam
