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

#include "binbeam/estimation.hpp"

#include <cmath>

#include "json.hpp"

namespace binbeam {

namespace {

constexpr double kNoSourceEigenvalueBand = 1e-6;

nlohmann::json matrix_to_json(const HermitianMatrix& m) {
  nlohmann::json rows = nlohmann::json::array();
  for (std::size_t r = 0; r < m.dim(); ++r) {
    nlohmann::json row = nlohmann::json::array();
    for (std::size_t c = 0; c < m.dim(); ++c) {
      row.push_back({m(r, c).real(), m(r, c).imag()});
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

HermitianMatrix matrix_from_json(const nlohmann::json& j) {
  HermitianMatrix m(j.size());
  for (std::size_t r = 0; r < j.size(); ++r) {
    for (std::size_t c = 0; c < j.size(); ++c) {
      m(r, c) = Complex(j.at(r).at(c).at(0).get<double>(), j.at(r).at(c).at(1).get<double>());
    }
  }
  return m;
}

nlohmann::json matrices_to_json(const std::vector<HermitianMatrix>& ms) {
  nlohmann::json out = nlohmann::json::array();
  for (const auto& m : ms) out.push_back(matrix_to_json(m));
  return out;
}

std::vector<HermitianMatrix> matrices_from_json(const nlohmann::json& j) {
  std::vector<HermitianMatrix> out;
  for (const auto& m : j) out.push_back(matrix_from_json(m));
  return out;
}

nlohmann::json vectors_to_json(const std::vector<ComplexVector>& vs) {
  nlohmann::json out = nlohmann::json::array();
  for (const ComplexVector& v : vs) {
    nlohmann::json row = nlohmann::json::array();
    for (const Complex& z : v) row.push_back({z.real(), z.imag()});
    out.push_back(std::move(row));
  }
  return out;
}

std::vector<ComplexVector> vectors_from_json(const nlohmann::json& j) {
  std::vector<ComplexVector> out;
  for (const auto& row : j) {
    ComplexVector v;
    for (const auto& z : row) v.emplace_back(z.at(0).get<double>(), z.at(1).get<double>());
    out.push_back(std::move(v));
  }
  return out;
}

// Per-bin average over an interval for a whole analysis.
std::vector<HermitianMatrix> estimate_all_bins(const std::vector<SpectralFrame>& frames,
                                               FrameInterval interval) {
  const std::size_t bins = frames.front().bins.size();
  std::vector<HermitianMatrix> out;
  out.reserve(bins);
  for (std::size_t k = 0; k < bins; ++k) out.push_back(estimate_correlation(frames, k, interval));
  return out;
}

SampleStream add_streams(const SampleStream& a, const SampleStream& b) {
  SampleStream out = a;
  for (std::size_t ch = 0; ch < out.size(); ++ch) {
    for (std::size_t i = 0; i < out[ch].size(); ++i) out[ch][i] += b[ch][i];
  }
  return out;
}

}  // namespace

HermitianMatrix estimate_correlation(const std::vector<SpectralFrame>& frames, std::size_t bin,
                                     FrameInterval interval) {
  if (interval.length() == 0) throw EmptyInterval("estimate_correlation: empty frame range");
  if (interval.end > frames.size()) {
    throw IntervalOutOfRange("estimate_correlation: interval beyond available frames");
  }
  if (bin >= frames.front().bins.size()) {
    throw InvalidBin("estimate_correlation: bin out of range");
  }
  const std::size_t dim = frames.front().bins[bin].size();
  HermitianMatrix acc(dim);
  for (std::size_t t = interval.begin; t < interval.end; ++t) {
    acc.add_outer(frames[t].bins[bin]);
  }
  acc.scale(1.0 / static_cast<double>(interval.length()));
  acc.symmetrize();
  return acc;
}

RtfGevdResult estimate_rtf_gevd(const HermitianMatrix& r_sn, const HermitianMatrix& r_n,
                                std::size_t ref_right) {
  if (r_sn.dim() != r_n.dim()) throw DimensionMismatch("estimate_rtf_gevd: dimension mismatch");
  if (ref_right >= r_n.dim()) throw DimensionMismatch("estimate_rtf_gevd: right reference index");

  GevdResult gevd = [&] {
    try {
      return gevd_principal(r_sn, r_n);
    } catch (const NotPositiveDefinite&) {
      // Estimated noise matrices from short intervals can be singular;
      // retry once with the default loading.
      HermitianMatrix loaded = r_n;
      loaded.add_diagonal(1e-9 * r_n.trace() / static_cast<double>(r_n.dim()));
      return gevd_principal(r_sn, loaded);
    }
  }();

  RtfGevdResult out;
  out.eigenvalue = gevd.eigenvalue;
  out.source_detected = gevd.eigenvalue >= 1.0 + kNoSourceEigenvalueBand;
  if (!out.source_detected) {
    // Degenerate pair: the principal direction is arbitrary, so hand back
    // the flagged result with pass-through reference vectors.
    out.left.assign(r_n.dim(), Complex(0.0, 0.0));
    out.right.assign(r_n.dim(), Complex(0.0, 0.0));
    out.left[0] = Complex(1.0, 0.0);
    out.right[ref_right] = Complex(1.0, 0.0);
    return out;
  }

  // Covariance-whitening back-projection onto the ATF direction.
  const ComplexVector a_dir = r_n.apply(gevd.eigenvector);
  const double scale = norm2(a_dir);
  const Complex ref_l = a_dir.front();
  const Complex ref_r = a_dir[ref_right];
  if (std::abs(ref_l) < 1e-10 * scale || std::abs(ref_r) < 1e-10 * scale) {
    throw ReferenceEntryNearZero("estimate_rtf_gevd: RTF undefined at a reference microphone");
  }

  out.left.resize(a_dir.size());
  out.right.resize(a_dir.size());
  for (std::size_t i = 0; i < a_dir.size(); ++i) {
    out.left[i] = a_dir[i] / ref_l;
    out.right[i] = a_dir[i] / ref_r;
  }
  out.left[0] = Complex(1.0, 0.0);
  out.right[ref_right] = Complex(1.0, 0.0);
  return out;
}

FrameInterval noise_prefix_interval(const SignalTimeline& timeline, const WolaConfig& cfg) {
  const std::size_t usable =
      timeline.noise_only_samples >= cfg.block_length
          ? (timeline.noise_only_samples - cfg.block_length) / cfg.hop() + 1
          : 0;
  return FrameInterval{0, usable};
}

FrameInterval observation_interval(const SignalTimeline& timeline, const WolaConfig& cfg,
                                   double seconds) {
  const std::size_t hop = cfg.hop();
  const std::size_t start = (timeline.noise_only_samples + hop - 1) / hop;
  const std::size_t frames = static_cast<std::size_t>(
      std::floor(seconds * static_cast<double>(cfg.sample_rate) / static_cast<double>(hop)));
  return FrameInterval{start, start + frames};
}

AnalyzedTimeline AnalyzedTimeline::from(const SignalTimeline& timeline, const WolaConfig& cfg) {
  AnalyzedTimeline out;
  out.noise_only_samples = timeline.noise_only_samples;
  out.mixture = analyze(timeline.mixture, cfg);
  {
    SampleStream undesired = timeline.noise;
    for (const SampleStream& u : timeline.interferers) undesired = add_streams(undesired, u);
    out.undesired = analyze(undesired, cfg);
  }
  out.desired_plus_noise = analyze(add_streams(timeline.desired, timeline.noise), cfg);
  out.interferer_plus_noise.reserve(timeline.interferers.size());
  for (const SampleStream& u : timeline.interferers) {
    out.interferer_plus_noise.push_back(analyze(add_streams(u, timeline.noise), cfg));
  }
  return out;
}

EstimationResult estimate_from_analyzed(const AnalyzedTimeline& analyzed, const WolaConfig& cfg,
                                        std::size_t mics_per_device, double observation_s) {
  cfg.validate();
  SignalTimeline shim;  // only the prefix length feeds the interval helpers
  shim.noise_only_samples = analyzed.noise_only_samples;
  const FrameInterval noise_iv = noise_prefix_interval(shim, cfg);
  if (noise_iv.length() == 0) {
    throw IntervalOutOfRange("estimation: noise-only prefix holds no full frame");
  }
  const FrameInterval obs_iv = observation_interval(shim, cfg, observation_s);
  if (obs_iv.length() == 0) {
    throw EmptyInterval("estimation: observation interval holds no frame");
  }
  if (obs_iv.end > analyzed.mixture.size()) {
    throw IntervalOutOfRange("estimation: observation interval beyond signal end");
  }

  EstimationResult result;
  result.noise_interval = noise_iv;
  result.observation_interval = obs_iv;

  CorrelationSet& cs = result.correlations;
  cs.dim = analyzed.mixture.front().bins.front().size();
  cs.noise_frames = noise_iv.length();
  cs.observation_frames = obs_iv.length();

  // R_n from the noise-only prefix of the mixture (equal to the noise
  // component there).
  cs.noise = estimate_all_bins(analyzed.mixture, noise_iv);
  cs.mixture = estimate_all_bins(analyzed.mixture, obs_iv);
  cs.undesired = estimate_all_bins(analyzed.undesired, obs_iv);
  cs.desired_plus_noise = estimate_all_bins(analyzed.desired_plus_noise, obs_iv);
  cs.interferer_plus_noise.resize(analyzed.interferer_plus_noise.size());
  for (std::size_t p = 0; p < analyzed.interferer_plus_noise.size(); ++p) {
    cs.interferer_plus_noise[p] = estimate_all_bins(analyzed.interferer_plus_noise[p], obs_iv);
  }

  // RTFs by covariance whitening against R_n.
  RtfEstimate& rtf = result.rtfs;
  rtf.mics_per_device = mics_per_device;
  const std::size_t bins = cs.bin_count();
  rtf.desired_left.resize(bins);
  rtf.desired_right.resize(bins);
  rtf.interferer_left.assign(cs.interferer_count(), std::vector<ComplexVector>(bins));
  rtf.interferer_right.assign(cs.interferer_count(), std::vector<ComplexVector>(bins));
  for (std::size_t k = 0; k < bins; ++k) {
    const RtfGevdResult desired =
        estimate_rtf_gevd(cs.desired_plus_noise[k], cs.noise[k], mics_per_device);
    rtf.desired_left[k] = desired.left;
    rtf.desired_right[k] = desired.right;
    for (std::size_t p = 0; p < cs.interferer_count(); ++p) {
      const RtfGevdResult interferer =
          estimate_rtf_gevd(cs.interferer_plus_noise[p][k], cs.noise[k], mics_per_device);
      rtf.interferer_left[p][k] = interferer.left;
      rtf.interferer_right[p][k] = interferer.right;
    }
  }
  return result;
}

EstimationResult build_correlation_set(const SignalTimeline& timeline, const WolaConfig& cfg,
                                       std::size_t mics_per_device, double observation_s) {
  return estimate_from_analyzed(AnalyzedTimeline::from(timeline, cfg), cfg, mics_per_device,
                                observation_s);
}

std::string CorrelationSet::to_json() const {
  nlohmann::json j;
  j["dim"] = dim;
  j["noise_frames"] = noise_frames;
  j["observation_frames"] = observation_frames;
  j["noise"] = matrices_to_json(noise);
  j["mixture"] = matrices_to_json(mixture);
  j["undesired"] = matrices_to_json(undesired);
  j["desired_plus_noise"] = matrices_to_json(desired_plus_noise);
  nlohmann::json per_p = nlohmann::json::array();
  for (const auto& ms : interferer_plus_noise) per_p.push_back(matrices_to_json(ms));
  j["interferer_plus_noise"] = std::move(per_p);
  return j.dump();
}

CorrelationSet CorrelationSet::from_json(const std::string& text) {
  nlohmann::json j = nlohmann::json::parse(text);
  CorrelationSet cs;
  cs.dim = j.at("dim").get<std::size_t>();
  cs.noise_frames = j.at("noise_frames").get<std::size_t>();
  cs.observation_frames = j.at("observation_frames").get<std::size_t>();
  cs.noise = matrices_from_json(j.at("noise"));
  cs.mixture = matrices_from_json(j.at("mixture"));
  cs.undesired = matrices_from_json(j.at("undesired"));
  cs.desired_plus_noise = matrices_from_json(j.at("desired_plus_noise"));
  for (const auto& ms : j.at("interferer_plus_noise")) {
    cs.interferer_plus_noise.push_back(matrices_from_json(ms));
  }
  return cs;
}

std::string RtfEstimate::to_json() const {
  nlohmann::json j;
  j["mics_per_device"] = mics_per_device;
  j["desired_left"] = vectors_to_json(desired_left);
  j["desired_right"] = vectors_to_json(desired_right);
  nlohmann::json il = nlohmann::json::array();
  nlohmann::json ir = nlohmann::json::array();
  for (const auto& vs : interferer_left) il.push_back(vectors_to_json(vs));
  for (const auto& vs : interferer_right) ir.push_back(vectors_to_json(vs));
  j["interferer_left"] = std::move(il);
  j["interferer_right"] = std::move(ir);
  return j.dump();
}

RtfEstimate RtfEstimate::from_json(const std::string& text) {
  nlohmann::json j = nlohmann::json::parse(text);
  RtfEstimate r;
  r.mics_per_device = j.at("mics_per_device").get<std::size_t>();
  r.desired_left = vectors_from_json(j.at("desired_left"));
  r.desired_right = vectors_from_json(j.at("desired_right"));
  for (const auto& vs : j.at("interferer_left")) r.interferer_left.push_back(vectors_from_json(vs));
  for (const auto& vs : j.at("interferer_right")) r.interferer_right.push_back(vectors_from_json(vs));
  return r;
}

}  // namespace binbeam
