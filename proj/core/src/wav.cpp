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

#include "binbeam/wav.hpp"

#include <cstdint>
#include <cstring>
#include <fstream>

namespace binbeam {

namespace {

constexpr std::uint16_t kFormatPcm = 1;
constexpr std::uint16_t kFormatIeeeFloat = 3;

template <typename T>
T read_le(std::istream& in) {
  unsigned char buf[sizeof(T)];
  in.read(reinterpret_cast<char*>(buf), sizeof(T));
  if (!in) throw FormatError("wav: unexpected end of file");
  std::uint64_t v = 0;
  for (std::size_t i = 0; i < sizeof(T); ++i) v |= static_cast<std::uint64_t>(buf[i]) << (8 * i);
  T out;
  std::memcpy(&out, &v, sizeof(T));
  return out;
}

template <typename T>
void write_le(std::ostream& out, T value) {
  std::uint64_t v = 0;
  std::memcpy(&v, &value, sizeof(T));
  unsigned char buf[sizeof(T)];
  for (std::size_t i = 0; i < sizeof(T); ++i) buf[i] = static_cast<unsigned char>(v >> (8 * i));
  out.write(reinterpret_cast<const char*>(buf), sizeof(T));
}

std::string read_tag(std::istream& in) {
  char tag[4];
  in.read(tag, 4);
  if (!in) throw FormatError("wav: unexpected end of file");
  return std::string(tag, 4);
}

}  // namespace

WavData read_wav(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("wav: cannot open " + path.string());

  if (read_tag(in) != "RIFF") throw FormatError("wav: missing RIFF header");
  read_le<std::uint32_t>(in);  // riff size
  if (read_tag(in) != "WAVE") throw FormatError("wav: not a WAVE file");

  std::uint16_t format = 0;
  std::uint16_t num_channels = 0;
  std::uint32_t sample_rate = 0;
  std::uint16_t bits_per_sample = 0;
  bool have_fmt = false;
  WavData out;

  while (in.peek() != EOF) {
    const std::string tag = read_tag(in);
    const std::uint32_t size = read_le<std::uint32_t>(in);
    if (tag == "fmt ") {
      format = read_le<std::uint16_t>(in);
      num_channels = read_le<std::uint16_t>(in);
      sample_rate = read_le<std::uint32_t>(in);
      read_le<std::uint32_t>(in);  // byte rate
      read_le<std::uint16_t>(in);  // block align
      bits_per_sample = read_le<std::uint16_t>(in);
      if (size > 16) in.seekg(size - 16, std::ios::cur);
      have_fmt = true;
    } else if (tag == "data") {
      if (!have_fmt) throw FormatError("wav: data chunk before fmt chunk");
      if (num_channels == 0) throw FormatError("wav: zero channels");
      const std::size_t bytes_per_sample = bits_per_sample / 8;
      if (bytes_per_sample == 0) throw FormatError("wav: zero bits per sample");
      const std::size_t total = size / (bytes_per_sample * num_channels);
      out.sample_rate = static_cast<int>(sample_rate);
      out.channels.assign(num_channels, std::vector<double>(total));
      for (std::size_t s = 0; s < total; ++s) {
        for (std::size_t ch = 0; ch < num_channels; ++ch) {
          double v = 0.0;
          if (format == kFormatPcm && bits_per_sample == 16) {
            v = static_cast<double>(read_le<std::int16_t>(in)) / 32768.0;
          } else if (format == kFormatIeeeFloat && bits_per_sample == 32) {
            v = static_cast<double>(read_le<float>(in));
          } else {
            throw FormatError("wav: unsupported sample format");
          }
          out.channels[ch][s] = v;
        }
      }
      return out;
    } else {
      in.seekg(size + (size & 1), std::ios::cur);
    }
  }
  throw FormatError("wav: no data chunk found");
}

void write_wav(const std::filesystem::path& path, const SampleStream& channels,
               int sample_rate) {
  if (channels.empty()) throw EmptyInput("wav: no channels to write");
  const std::size_t samples = channels.front().size();
  for (const auto& ch : channels) {
    if (ch.size() != samples) throw ChannelCountMismatch("wav: ragged channel lengths");
  }

  std::ofstream out(path, std::ios::binary);
  if (!out) throw FormatError("wav: cannot open " + path.string() + " for writing");

  const std::uint16_t num_channels = static_cast<std::uint16_t>(channels.size());
  const std::uint32_t data_bytes = static_cast<std::uint32_t>(samples * num_channels * 4);

  out.write("RIFF", 4);
  write_le<std::uint32_t>(out, 36 + data_bytes);
  out.write("WAVE", 4);
  out.write("fmt ", 4);
  write_le<std::uint32_t>(out, 16);
  write_le<std::uint16_t>(out, kFormatIeeeFloat);
  write_le<std::uint16_t>(out, num_channels);
  write_le<std::uint32_t>(out, static_cast<std::uint32_t>(sample_rate));
  write_le<std::uint32_t>(out, static_cast<std::uint32_t>(sample_rate) * num_channels * 4);
  write_le<std::uint16_t>(out, static_cast<std::uint16_t>(num_channels * 4));
  write_le<std::uint16_t>(out, 32);
  out.write("data", 4);
  write_le<std::uint32_t>(out, data_bytes);
  for (std::size_t s = 0; s < samples; ++s) {
    for (std::size_t ch = 0; ch < num_channels; ++ch) {
      write_le<float>(out, static_cast<float>(channels[ch][s]));
    }
  }
  if (!out) throw FormatError("wav: write failed");
}

}  // namespace binbeam
