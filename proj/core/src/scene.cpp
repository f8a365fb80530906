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

#include "binbeam/scene.hpp"

#include <cmath>
#include <numbers>
#include <random>

#include "json.hpp"

namespace binbeam {

namespace {

constexpr double kHeadShadowGain = 0.3;
// Source spectra are flat below this corner and roll off as 1/f above it.
constexpr double kSourceCornerHz = 125.0;

constexpr std::uint64_t kStreamNoise = 0;
constexpr std::uint64_t kStreamDesired = 1;
constexpr std::uint64_t kStreamInterfererBase = 2;

double sinc(double x) { return x == 0.0 ? 1.0 : std::sin(x) / x; }

// splitmix64, used to key one RNG stream per (seed, component, bin).
std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::uint64_t stream_seed(std::uint64_t seed, std::uint64_t component, std::uint64_t bin) {
  return mix64(mix64(mix64(seed) ^ component) ^ (bin * 0x9e3779b97f4a7c15ULL + 1));
}

// Standard circular complex Gaussian, E|z|^2 = 1, via Box-Muller on explicit
// uniform draws so results do not depend on library distribution internals.
class ComplexGaussian {
 public:
  explicit ComplexGaussian(std::uint64_t seed) : rng_(seed) {}

  Complex operator()() {
    const double u1 = uniform_open();
    const double u2 = uniform();
    const double radius = std::sqrt(-std::log(u1));
    const double angle = 2.0 * std::numbers::pi * u2;
    return Complex(radius * std::cos(angle), radius * std::sin(angle));
  }

 private:
  double uniform() {
    return static_cast<double>(rng_() >> 11) * 0x1.0p-53;
  }
  double uniform_open() {
    // (0, 1]: avoids log(0).
    return static_cast<double>((rng_() >> 11) + 1) * 0x1.0p-53;
  }
  std::mt19937_64 rng_;
};

double speech_shaped_psd(double frequency_hz) {
  return kSourceCornerHz / std::max(frequency_hz, kSourceCornerHz);
}

// Frames needed so the synthesized signal covers at least `samples`.
std::size_t frames_covering(std::size_t samples, const WolaConfig& cfg) {
  if (samples <= cfg.block_length) return 1;
  const std::size_t rest = samples - cfg.block_length;
  return (rest + cfg.hop() - 1) / cfg.hop() + 1;
}

SampleStream truncate(SampleStream s, std::size_t samples) {
  for (auto& ch : s) ch.resize(samples);
  return s;
}

// Synthesizes one coherent source: per bin, iid complex Gaussian frame
// amplitudes with the speech-shaped PSD, mapped through the source ATF.
// Frames before active_start_frame stay zero.
SampleStream synthesize_source(const std::vector<ComplexVector>& atf, const WolaConfig& cfg,
                               std::size_t total_frames, std::size_t active_start_frame,
                               std::size_t total_samples, std::uint64_t seed,
                               std::uint64_t component) {
  const std::size_t bins = cfg.bin_count();
  const std::size_t channels = atf.front().size();
  std::vector<SpectralFrame> frames(total_frames);
  for (std::size_t t = 0; t < total_frames; ++t) {
    frames[t].frame_index = t;
    frames[t].bins.assign(bins, ComplexVector(channels));
  }
  for (std::size_t k = 0; k < bins; ++k) {
    ComplexGaussian gauss(stream_seed(seed, component, k));
    const double sigma = std::sqrt(speech_shaped_psd(cfg.bin_frequency_hz(k)));
    for (std::size_t t = active_start_frame; t < total_frames; ++t) {
      const Complex s = sigma * gauss();
      for (std::size_t m = 0; m < channels; ++m) frames[t].bins[k][m] = s * atf[k][m];
    }
  }
  return truncate(synthesize(frames, cfg), total_samples);
}

SampleStream synthesize_diffuse(const ArrayGeometry& geom, const WolaConfig& cfg,
                                std::size_t total_frames, std::size_t total_samples,
                                std::uint64_t seed) {
  const std::size_t bins = cfg.bin_count();
  const std::size_t channels = geom.channel_count();
  std::vector<SpectralFrame> frames(total_frames);
  for (std::size_t t = 0; t < total_frames; ++t) {
    frames[t].frame_index = t;
    frames[t].bins.assign(bins, ComplexVector(channels));
  }
  for (std::size_t k = 0; k < bins; ++k) {
    const HermitianMatrix gamma = diffuse_coherence(geom, cfg.bin_frequency_hz(k));
    const ComplexMatrix shaper = hermitian_factor(gamma);
    ComplexGaussian gauss(stream_seed(seed, kStreamNoise, k));
    ComplexVector draw(channels);
    for (std::size_t t = 0; t < total_frames; ++t) {
      for (std::size_t m = 0; m < channels; ++m) draw[m] = gauss();
      frames[t].bins[k] = shaper.apply(draw);
    }
  }
  return truncate(synthesize(frames, cfg), total_samples);
}

// Sum of squared samples at the two reference channels over [begin, end).
double reference_power(const SampleStream& s, std::size_t ref_left, std::size_t ref_right,
                       std::size_t begin, std::size_t end) {
  double acc = 0.0;
  for (std::size_t i = begin; i < end; ++i) {
    acc += s[ref_left][i] * s[ref_left][i];
    if (ref_right != ref_left) acc += s[ref_right][i] * s[ref_right][i];
  }
  return acc;
}

void scale_stream(SampleStream& s, double factor) {
  for (auto& ch : s) {
    for (double& v : ch) v *= factor;
  }
}

nlohmann::json complex_to_json(const Complex& z) {
  return nlohmann::json::array({z.real(), z.imag()});
}

Complex complex_from_json(const nlohmann::json& j) {
  return Complex(j.at(0).get<double>(), j.at(1).get<double>());
}

nlohmann::json atf_bins_to_json(const std::vector<ComplexVector>& bins) {
  nlohmann::json out = nlohmann::json::array();
  for (const ComplexVector& v : bins) {
    nlohmann::json row = nlohmann::json::array();
    for (const Complex& z : v) row.push_back(complex_to_json(z));
    out.push_back(std::move(row));
  }
  return out;
}

std::vector<ComplexVector> atf_bins_from_json(const nlohmann::json& j) {
  std::vector<ComplexVector> out;
  for (const auto& row : j) {
    ComplexVector v;
    for (const auto& z : row) v.push_back(complex_from_json(z));
    out.push_back(std::move(v));
  }
  return out;
}

}  // namespace

ArrayGeometry ArrayGeometry::binaural_default() {
  ArrayGeometry g;
  g.mics_per_device = 2;
  g.positions = {
      {-0.08, +0.004, 0.0},  // L1 (front)
      {-0.08, -0.004, 0.0},  // L2
      {+0.08, +0.004, 0.0},  // R1 (front)
      {+0.08, -0.004, 0.0},  // R2
  };
  return g;
}

ComplexVector AtfVector::rtf_left() const {
  const Complex ref = a.front();
  if (std::abs(ref) == 0.0) throw ReferenceEntryNearZero("rtf_left: zero reference entry");
  ComplexVector out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] / ref;
  out[0] = Complex(1.0, 0.0);
  return out;
}

ComplexVector AtfVector::rtf_right(std::size_t mics_per_device) const {
  const Complex ref = a[mics_per_device];
  if (std::abs(ref) == 0.0) throw ReferenceEntryNearZero("rtf_right: zero reference entry");
  ComplexVector out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] / ref;
  out[mics_per_device] = Complex(1.0, 0.0);
  return out;
}

double SceneSpec::sir_for(std::size_t p) const {
  if (sir_db.empty()) return 0.0;
  if (sir_db.size() == 1) return sir_db.front();
  return sir_db.at(p);
}

void SceneSpec::validate() const {
  auto check_angle = [](double a) {
    if (!(a > -180.0 && a <= 180.0)) {
      throw InfeasibleSpec("scene: angle out of (-180, 180]");
    }
  };
  check_angle(desired_angle_deg);
  for (double a : interferer_angles_deg) check_angle(a);
  if (!sir_db.empty() && sir_db.size() != 1 && sir_db.size() != interferer_angles_deg.size()) {
    throw InfeasibleSpec("scene: SIR list does not match interferer count");
  }
  if (noise_only_s < 0.0 || active_s <= 0.0) {
    throw InfeasibleSpec("scene: non-positive durations");
  }
}

AtfVector atf_from_angle(double angle_deg, const ArrayGeometry& geom, std::size_t bin,
                         const WolaConfig& cfg) {
  if (bin >= cfg.bin_count()) throw InvalidBin("atf_from_angle: bin outside one-sided spectrum");
  const double angle = angle_deg * std::numbers::pi / 180.0;
  const double f = cfg.bin_frequency_hz(bin);
  // Unit vector from the array toward the source.
  const double dx = std::sin(angle);
  const double dy = std::cos(angle);

  AtfVector out;
  out.bin = bin;
  out.a.resize(geom.channel_count());
  for (std::size_t m = 0; m < geom.channel_count(); ++m) {
    const Vec3& p = geom.positions[m];
    const double delay = -(dx * p.x + dy * p.y) / geom.speed_of_sound;
    const double side = (m < static_cast<std::size_t>(geom.mics_per_device)) ? -1.0 : 1.0;
    const double gain = 1.0 + kHeadShadowGain * std::sin(angle) * side;
    const double phase = -2.0 * std::numbers::pi * f * delay;
    out.a[m] = gain * Complex(std::cos(phase), std::sin(phase));
  }
  return out;
}

HermitianMatrix diffuse_coherence(const ArrayGeometry& geom, double frequency_hz) {
  const std::size_t n = geom.channel_count();
  HermitianMatrix gamma(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      const double ddx = geom.positions[i].x - geom.positions[j].x;
      const double ddy = geom.positions[i].y - geom.positions[j].y;
      const double ddz = geom.positions[i].z - geom.positions[j].z;
      const double dist = std::sqrt(ddx * ddx + ddy * ddy + ddz * ddz);
      gamma(i, j) =
          sinc(2.0 * std::numbers::pi * frequency_hz * dist / geom.speed_of_sound);
    }
  }
  return gamma;
}

SampleStream diffuse_noise(const ArrayGeometry& geom, const WolaConfig& cfg, double duration_s,
                           std::uint64_t seed) {
  cfg.validate();
  const std::size_t samples = cfg.seconds_to_samples(duration_s);
  if (samples < cfg.block_length) {
    throw SignalTooShort("diffuse_noise: duration shorter than one block");
  }
  return synthesize_diffuse(geom, cfg, frames_covering(samples, cfg), samples, seed);
}

Scene mix_scene(const SceneSpec& spec, const ArrayGeometry& geom, const WolaConfig& cfg) {
  cfg.validate();
  spec.validate();

  const std::size_t noise_samples = cfg.seconds_to_samples(spec.noise_only_s);
  // One synthesis tail block beyond the nominal duration so an observation
  // interval spanning the full active segment still has complete frames.
  const std::size_t total_samples = noise_samples + cfg.seconds_to_samples(spec.active_s) +
                                    (cfg.block_length - cfg.hop());
  const std::size_t total_frames = frames_covering(total_samples, cfg);
  const std::size_t hop = cfg.hop();
  const std::size_t active_start_frame = (noise_samples + hop - 1) / hop;
  if (active_start_frame >= total_frames) {
    throw InfeasibleSpec("scene: active segment contains no frames");
  }

  const std::size_t bins = cfg.bin_count();
  const std::size_t p_count = spec.interferer_count();
  const std::size_t ref_l = geom.reference_left();
  const std::size_t ref_r = geom.reference_right();

  SceneModel model;
  model.spec = spec;
  model.geometry = geom;
  model.wola = cfg;
  model.desired_atf.resize(bins);
  model.desired_psd.resize(bins);
  model.interferer_atf.assign(p_count, std::vector<ComplexVector>(bins));
  model.interferer_psd.assign(p_count, std::vector<double>(bins));
  model.noise_psd.assign(bins, 1.0);

  for (std::size_t k = 0; k < bins; ++k) {
    model.desired_atf[k] = atf_from_angle(spec.desired_angle_deg, geom, k, cfg).a;
    model.desired_psd[k] = speech_shaped_psd(cfg.bin_frequency_hz(k));
    for (std::size_t p = 0; p < p_count; ++p) {
      model.interferer_atf[p][k] = atf_from_angle(spec.interferer_angles_deg[p], geom, k, cfg).a;
      model.interferer_psd[p][k] = model.desired_psd[k];
    }
  }

  SignalTimeline tl;
  tl.sample_rate = cfg.sample_rate;
  tl.noise_only_samples = noise_samples;
  tl.noise = synthesize_diffuse(geom, cfg, total_frames, total_samples, spec.seed);
  tl.desired = synthesize_source(model.desired_atf, cfg, total_frames, active_start_frame,
                                 total_samples, spec.seed, kStreamDesired);
  tl.interferers.resize(p_count);
  for (std::size_t p = 0; p < p_count; ++p) {
    tl.interferers[p] =
        synthesize_source(model.interferer_atf[p], cfg, total_frames, active_start_frame,
                          total_samples, spec.seed, kStreamInterfererBase + p);
  }

  // Scale components so the broadband ratios at the reference microphones
  // match the spec over the active segment.
  const double noise_power = reference_power(tl.noise, ref_l, ref_r, noise_samples, total_samples);
  const double desired_power =
      reference_power(tl.desired, ref_l, ref_r, noise_samples, total_samples);
  if (desired_power <= 0.0 || noise_power <= 0.0) {
    throw InfeasibleSpec("scene: zero-power component");
  }
  const double snr_target = std::pow(10.0, spec.snr_db / 10.0);
  const double desired_gain = std::sqrt(snr_target * noise_power / desired_power);
  scale_stream(tl.desired, desired_gain);
  for (std::size_t k = 0; k < bins; ++k) model.desired_psd[k] *= desired_gain * desired_gain;

  const double scaled_desired_power = desired_gain * desired_gain * desired_power;
  for (std::size_t p = 0; p < p_count; ++p) {
    const double u_power =
        reference_power(tl.interferers[p], ref_l, ref_r, noise_samples, total_samples);
    if (u_power <= 0.0) throw InfeasibleSpec("scene: zero-power interferer");
    const double sir_target = std::pow(10.0, spec.sir_for(p) / 10.0);
    const double gain = std::sqrt(scaled_desired_power / (sir_target * u_power));
    scale_stream(tl.interferers[p], gain);
    for (std::size_t k = 0; k < bins; ++k) model.interferer_psd[p][k] *= gain * gain;
  }

  // y = x + sum_p u_p + n, summed in exactly this order.
  tl.mixture.assign(geom.channel_count(), std::vector<double>(total_samples, 0.0));
  for (std::size_t ch = 0; ch < geom.channel_count(); ++ch) {
    for (std::size_t i = 0; i < total_samples; ++i) {
      double v = tl.desired[ch][i];
      for (std::size_t p = 0; p < p_count; ++p) v += tl.interferers[p][ch][i];
      v += tl.noise[ch][i];
      tl.mixture[ch][i] = v;
    }
  }

  return Scene{std::move(tl), std::move(model)};
}

HermitianMatrix SceneModel::noise_coherence(std::size_t bin) const {
  return diffuse_coherence(geometry, wola.bin_frequency_hz(bin));
}

HermitianMatrix SceneModel::correlation_desired(std::size_t bin) const {
  return HermitianMatrix::outer(desired_atf[bin], desired_psd[bin]);
}

HermitianMatrix SceneModel::correlation_interferer(std::size_t p, std::size_t bin) const {
  return HermitianMatrix::outer(interferer_atf[p][bin], interferer_psd[p][bin]);
}

HermitianMatrix SceneModel::correlation_interference(std::size_t bin) const {
  HermitianMatrix sum(geometry.channel_count());
  for (std::size_t p = 0; p < interferer_count(); ++p) {
    sum.add_scaled(correlation_interferer(p, bin), 1.0);
  }
  return sum;
}

HermitianMatrix SceneModel::correlation_noise(std::size_t bin) const {
  HermitianMatrix gamma = noise_coherence(bin);
  gamma.scale(noise_psd[bin]);
  return gamma;
}

HermitianMatrix SceneModel::correlation_undesired(std::size_t bin) const {
  HermitianMatrix sum = correlation_interference(bin);
  sum.add_scaled(correlation_noise(bin), 1.0);
  return sum;
}

HermitianMatrix SceneModel::correlation_mixture(std::size_t bin) const {
  HermitianMatrix sum = correlation_undesired(bin);
  sum.add_scaled(correlation_desired(bin), 1.0);
  return sum;
}

std::string SceneModel::to_json() const {
  nlohmann::json j;
  j["spec"] = {
      {"desired_angle_deg", spec.desired_angle_deg},
      {"interferer_angles_deg", spec.interferer_angles_deg},
      {"snr_db", spec.snr_db},
      {"sir_db", spec.sir_db},
      {"noise_only_s", spec.noise_only_s},
      {"active_s", spec.active_s},
      {"seed", spec.seed},
  };
  nlohmann::json pos = nlohmann::json::array();
  for (const Vec3& p : geometry.positions) pos.push_back({p.x, p.y, p.z});
  j["geometry"] = {
      {"mics_per_device", geometry.mics_per_device},
      {"positions", pos},
      {"speed_of_sound", geometry.speed_of_sound},
  };
  j["wola"] = {
      {"block_length", wola.block_length},
      {"overlap", wola.overlap},
      {"sample_rate", wola.sample_rate},
  };
  j["desired_atf"] = atf_bins_to_json(desired_atf);
  j["desired_psd"] = desired_psd;
  nlohmann::json int_atf = nlohmann::json::array();
  for (const auto& per_bin : interferer_atf) int_atf.push_back(atf_bins_to_json(per_bin));
  j["interferer_atf"] = std::move(int_atf);
  j["interferer_psd"] = interferer_psd;
  j["noise_psd"] = noise_psd;
  return j.dump(2);
}

SceneModel SceneModel::from_json(const std::string& text) {
  nlohmann::json j = nlohmann::json::parse(text);
  SceneModel m;
  const auto& js = j.at("spec");
  m.spec.desired_angle_deg = js.at("desired_angle_deg").get<double>();
  m.spec.interferer_angles_deg = js.at("interferer_angles_deg").get<std::vector<double>>();
  m.spec.snr_db = js.at("snr_db").get<double>();
  m.spec.sir_db = js.at("sir_db").get<std::vector<double>>();
  m.spec.noise_only_s = js.at("noise_only_s").get<double>();
  m.spec.active_s = js.at("active_s").get<double>();
  m.spec.seed = js.at("seed").get<std::uint64_t>();
  const auto& jg = j.at("geometry");
  m.geometry.mics_per_device = jg.at("mics_per_device").get<int>();
  for (const auto& p : jg.at("positions")) {
    m.geometry.positions.push_back({p.at(0).get<double>(), p.at(1).get<double>(),
                                    p.at(2).get<double>()});
  }
  m.geometry.speed_of_sound = jg.at("speed_of_sound").get<double>();
  const auto& jw = j.at("wola");
  m.wola.block_length = jw.at("block_length").get<std::size_t>();
  m.wola.overlap = jw.at("overlap").get<double>();
  m.wola.sample_rate = jw.at("sample_rate").get<int>();
  m.desired_atf = atf_bins_from_json(j.at("desired_atf"));
  m.desired_psd = j.at("desired_psd").get<std::vector<double>>();
  for (const auto& per_bin : j.at("interferer_atf")) {
    m.interferer_atf.push_back(atf_bins_from_json(per_bin));
  }
  m.interferer_psd = j.at("interferer_psd").get<std::vector<std::vector<double>>>();
  m.noise_psd = j.at("noise_psd").get<std::vector<double>>();
  return m;
}

}  // namespace binbeam
