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

#include "binbeam/wola.hpp"

#include <cmath>
#include <numbers>

namespace binbeam {

namespace {

bool is_power_of_two(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

// Iterative radix-2 FFT, in place. Inverse includes the 1/n scale.
void fft(std::vector<Complex>& a, bool inverse) {
  const std::size_t n = a.size();
  for (std::size_t i = 1, j = 0; i < n; ++i) {
    std::size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(a[i], a[j]);
  }
  for (std::size_t len = 2; len <= n; len <<= 1) {
    const double ang = 2.0 * std::numbers::pi / static_cast<double>(len) * (inverse ? 1.0 : -1.0);
    const Complex wlen(std::cos(ang), std::sin(ang));
    for (std::size_t i = 0; i < n; i += len) {
      Complex w(1.0, 0.0);
      for (std::size_t j = 0; j < len / 2; ++j) {
        const Complex u = a[i + j];
        const Complex v = a[i + j + len / 2] * w;
        a[i + j] = u + v;
        a[i + j + len / 2] = u - v;
        w *= wlen;
      }
    }
  }
  if (inverse) {
    const double inv_n = 1.0 / static_cast<double>(n);
    for (Complex& z : a) z *= inv_n;
  }
}

}  // namespace

void WolaConfig::validate() const {
  if (!is_power_of_two(block_length)) {
    throw Error("wola: block_length must be a power of two");
  }
  if (!(overlap > 0.0 && overlap < 1.0)) {
    throw Error("wola: overlap must lie in (0, 1)");
  }
  const double hop_exact = static_cast<double>(block_length) * (1.0 - overlap);
  if (std::abs(hop_exact - std::round(hop_exact)) > 1e-9 || std::round(hop_exact) < 1.0) {
    throw Error("wola: block_length * (1 - overlap) must be a whole number of samples");
  }
  if (sample_rate <= 0) throw Error("wola: sample_rate must be positive");
}

std::size_t WolaConfig::hop() const {
  return static_cast<std::size_t>(std::llround(static_cast<double>(block_length) * (1.0 - overlap)));
}

double WolaConfig::bin_frequency_hz(std::size_t bin) const {
  return static_cast<double>(bin) * static_cast<double>(sample_rate) /
         static_cast<double>(block_length);
}

std::vector<double> WolaConfig::window() const {
  std::vector<double> w(block_length);
  for (std::size_t n = 0; n < block_length; ++n) {
    const double hann =
        0.5 * (1.0 - std::cos(2.0 * std::numbers::pi * static_cast<double>(n) /
                              static_cast<double>(block_length)));
    w[n] = std::sqrt(hann);
  }
  return w;
}

std::size_t WolaConfig::frame_count(std::size_t samples) const {
  if (samples < block_length) return 0;
  return (samples - block_length) / hop() + 1;
}

std::size_t WolaConfig::seconds_to_samples(double seconds) const {
  return static_cast<std::size_t>(std::llround(seconds * sample_rate));
}

MultichannelFrame extract_frame(const SampleStream& signal, const WolaConfig& cfg,
                                std::size_t frame_index) {
  cfg.validate();
  const std::size_t start = frame_index * cfg.hop();
  MultichannelFrame frame;
  frame.frame_index = frame_index;
  frame.channels.resize(signal.size());
  for (std::size_t ch = 0; ch < signal.size(); ++ch) {
    if (start + cfg.block_length > signal[ch].size()) {
      throw SignalTooShort("extract_frame: frame exceeds signal length");
    }
    frame.channels[ch].assign(
        signal[ch].begin() + static_cast<std::ptrdiff_t>(start),
        signal[ch].begin() + static_cast<std::ptrdiff_t>(start + cfg.block_length));
  }
  return frame;
}

std::vector<SpectralFrame> analyze(const SampleStream& signal, const WolaConfig& cfg) {
  cfg.validate();
  if (signal.empty()) throw EmptyInput("analyze: no channels");
  const std::size_t samples = signal.front().size();
  for (const auto& ch : signal) {
    if (ch.size() != samples) throw ChannelCountMismatch("analyze: ragged channel lengths");
  }
  if (samples < cfg.block_length) throw SignalTooShort("analyze: signal shorter than one block");

  const std::size_t channels = signal.size();
  const std::size_t hop = cfg.hop();
  const std::size_t frames = cfg.frame_count(samples);
  const std::size_t bins = cfg.bin_count();
  const std::vector<double> win = cfg.window();

  std::vector<SpectralFrame> out(frames);
  std::vector<Complex> buf(cfg.block_length);
  for (std::size_t t = 0; t < frames; ++t) {
    SpectralFrame& frame = out[t];
    frame.frame_index = t;
    frame.bins.assign(bins, ComplexVector(channels));
    const std::size_t start = t * hop;
    for (std::size_t ch = 0; ch < channels; ++ch) {
      for (std::size_t n = 0; n < cfg.block_length; ++n) {
        buf[n] = Complex(signal[ch][start + n] * win[n], 0.0);
      }
      fft(buf, /*inverse=*/false);
      for (std::size_t k = 0; k < bins; ++k) frame.bins[k][ch] = buf[k];
    }
  }
  return out;
}

SampleStream synthesize(const std::vector<SpectralFrame>& frames, const WolaConfig& cfg) {
  cfg.validate();
  if (frames.empty()) throw EmptyInput("synthesize: no frames");
  const std::size_t bins = cfg.bin_count();
  const std::size_t channels =
      frames.front().bins.empty() ? 0 : frames.front().bins.front().size();
  if (channels == 0) throw EmptyInput("synthesize: no channels");
  for (const SpectralFrame& f : frames) {
    if (f.bins.size() != bins) throw BinCountMismatch("synthesize: wrong bin count");
    for (const ComplexVector& b : f.bins) {
      if (b.size() != channels) throw ChannelCountMismatch("synthesize: ragged bins");
    }
  }

  const std::size_t hop = cfg.hop();
  const std::size_t n = cfg.block_length;
  const std::size_t out_len = (frames.size() - 1) * hop + n;
  const std::vector<double> win = cfg.window();

  SampleStream out(channels, std::vector<double>(out_len, 0.0));
  std::vector<double> denom(out_len, 0.0);

  std::vector<Complex> buf(n);
  for (std::size_t t = 0; t < frames.size(); ++t) {
    const std::size_t start = t * hop;
    for (std::size_t ch = 0; ch < channels; ++ch) {
      buf[0] = frames[t].bins[0][ch];
      buf[n / 2] = frames[t].bins[n / 2][ch];
      for (std::size_t k = 1; k < n / 2; ++k) {
        buf[k] = frames[t].bins[k][ch];
        buf[n - k] = std::conj(frames[t].bins[k][ch]);
      }
      fft(buf, /*inverse=*/true);
      for (std::size_t s = 0; s < n; ++s) {
        out[ch][start + s] += buf[s].real() * win[s];
      }
    }
    for (std::size_t s = 0; s < n; ++s) denom[start + s] += win[s] * win[s];
  }

  // Normalize by the realized window-product coverage; on the interior this
  // is the constant-overlap-add sum.
  for (std::size_t s = 0; s < out_len; ++s) {
    if (denom[s] > 1e-12) {
      const double inv = 1.0 / denom[s];
      for (std::size_t ch = 0; ch < channels; ++ch) out[ch][s] *= inv;
    }
  }
  return out;
}

std::vector<SpectralFrame> apply_filter(const std::vector<SpectralFrame>& frames,
                                        const std::vector<BeamformerPair>& filter) {
  std::vector<SpectralFrame> out(frames.size());
  for (std::size_t t = 0; t < frames.size(); ++t) {
    const SpectralFrame& in = frames[t];
    if (in.bins.size() != filter.size()) {
      throw BinCountMismatch("apply_filter: filter not defined for every bin");
    }
    SpectralFrame& dst = out[t];
    dst.frame_index = in.frame_index;
    dst.bins.assign(in.bins.size(), ComplexVector(2));
    for (std::size_t k = 0; k < in.bins.size(); ++k) {
      dst.bins[k][0] = inner(filter[k].left, in.bins[k]);
      dst.bins[k][1] = inner(filter[k].right, in.bins[k]);
    }
  }
  return out;
}

}  // namespace binbeam
