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

#include <filesystem>

#include "binbeam/wola.hpp"

namespace binbeam {

struct WavData {
  int sample_rate = 0;
  SampleStream channels;
};

// Reads RIFF WAV, PCM 16-bit or IEEE float 32-bit, any channel count.
WavData read_wav(const std::filesystem::path& path);

// Writes IEEE float 32-bit interleaved.
void write_wav(const std::filesystem::path& path, const SampleStream& channels,
               int sample_rate);

}  // namespace binbeam
