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

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "binbeam/linalg.hpp"
#include "binbeam/wola.hpp"

namespace binbeam {

struct Vec3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;
};

// Microphone positions in meters. Channel order is [L1..LM, R1..RM]; the
// reference microphones are channels 0 and M. Angles are measured on the
// horizontal plane: 0 deg frontal (+y), -90 deg left, +90 deg right.
struct ArrayGeometry {
  int mics_per_device = 2;
  std::vector<Vec3> positions;
  double speed_of_sound = 343.0;

  // Two devices at x = +-0.08 m, two microphones each, 0.008 m apart along
  // the front axis.
  static ArrayGeometry binaural_default();

  std::size_t channel_count() const { return positions.size(); }
  std::size_t reference_left() const { return 0; }
  std::size_t reference_right() const { return static_cast<std::size_t>(mics_per_device); }
};

// Acoustic transfer function of one source at one bin, all channels.
struct AtfVector {
  std::size_t bin = 0;
  ComplexVector a;

  Complex reference_left() const { return a.front(); }
  Complex reference_right(std::size_t mics_per_device) const { return a[mics_per_device]; }
  // a / A_L and a / A_R with the reference entry pinned to exactly 1.
  ComplexVector rtf_left() const;
  ComplexVector rtf_right(std::size_t mics_per_device) const;
};

struct SceneSpec {
  double desired_angle_deg = -35.0;
  std::vector<double> interferer_angles_deg;
  double snr_db = 5.0;
  std::vector<double> sir_db;  // per interferer; empty means 0 dB each
  double noise_only_s = 2.0;
  double active_s = 20.0;
  std::uint64_t seed = 1;

  std::size_t interferer_count() const { return interferer_angles_deg.size(); }
  double sir_for(std::size_t p) const;
  void validate() const;
};

// Component streams of one synthesized scene; the mixture is their exact
// sample-wise sum and the first noise_only_samples of the source components
// are zero.
struct SignalTimeline {
  SampleStream desired;                    // x
  std::vector<SampleStream> interferers;   // u_p
  SampleStream noise;                      // n
  SampleStream mixture;                    // y
  std::size_t noise_only_samples = 0;
  int sample_rate = 16000;
};

// The population model a timeline was drawn from: true ATFs and per-bin
// PSDs. Exact correlation matrices for metrics and oracles come from here.
struct SceneModel {
  SceneSpec spec;
  ArrayGeometry geometry;
  WolaConfig wola;
  std::vector<ComplexVector> desired_atf;                 // [bin][2M]
  std::vector<std::vector<ComplexVector>> interferer_atf; // [p][bin][2M]
  std::vector<double> desired_psd;                        // [bin]
  std::vector<std::vector<double>> interferer_psd;        // [p][bin]
  std::vector<double> noise_psd;                          // [bin]

  std::size_t bin_count() const { return desired_psd.size(); }
  std::size_t interferer_count() const { return interferer_atf.size(); }

  HermitianMatrix noise_coherence(std::size_t bin) const;
  HermitianMatrix correlation_desired(std::size_t bin) const;
  HermitianMatrix correlation_interferer(std::size_t p, std::size_t bin) const;
  HermitianMatrix correlation_interference(std::size_t bin) const;  // sum over p
  HermitianMatrix correlation_noise(std::size_t bin) const;
  HermitianMatrix correlation_undesired(std::size_t bin) const;     // interference + noise
  HermitianMatrix correlation_mixture(std::size_t bin) const;

  std::string to_json() const;
  static SceneModel from_json(const std::string& text);
};

struct Scene {
  SignalTimeline timeline;
  SceneModel model;
};

// Far-field plane-wave ATF with a frequency-independent head-shadow gain
// 1 + 0.3 sin(angle) per device side.
AtfVector atf_from_angle(double angle_deg, const ArrayGeometry& geom, std::size_t bin,
                         const WolaConfig& cfg);

// Spatial coherence of a spherically isotropic noise field,
// sinc(2 pi f d_ij / c).
HermitianMatrix diffuse_coherence(const ArrayGeometry& geom, double frequency_hz);

// Multichannel noise whose per-bin spatial coherence follows
// diffuse_coherence(); independent complex Gaussian spectra shaped by the
// Cholesky factor of the coherence matrix.
SampleStream diffuse_noise(const ArrayGeometry& geom, const WolaConfig& cfg, double duration_s,
                           std::uint64_t seed);

// Builds the full scene: speech-shaped sources mapped through their ATFs,
// diffuse noise, components scaled so the broadband input SNR and
// per-interferer input SIRs at the reference microphones match the spec.
Scene mix_scene(const SceneSpec& spec, const ArrayGeometry& geom, const WolaConfig& cfg);

}  // namespace binbeam
