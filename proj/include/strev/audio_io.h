// include/strev/audio_io.h

// Copyright 2026 The strev Authors
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

#ifndef STREV_AUDIO_IO_H_
#define STREV_AUDIO_IO_H_

#include <filesystem>
#include <string>
#include <vector>

namespace strev {

constexpr int kModelSampleRate = 16000;

// Mono signal. Amplitudes nominally lie in [-1, 1].
struct Waveform {
  std::vector<double> samples;
  int sample_rate = kModelSampleRate;
  std::string id;

  double duration_seconds() const {
    return static_cast<double>(samples.size()) / sample_rate;
  }
};

// Throws kInvalidArgument unless the waveform is non-empty, has a positive
// rate and finite samples.
void validate(const Waveform& w);

// Sum of squares accumulated in ascending order of magnitude, so any
// permutation of the samples gives a bit-identical result.
double energy(const Waveform& w);

// Reads RIFF/WAVE with PCM16 or float32 samples, 1 or 2 channels. Stereo is
// averaged to mono; PCM16 is scaled by 1/32768.
Waveform read_wav(const std::filesystem::path& path);

// Writes 16-bit PCM mono. Samples are clipped to [-1, 1] first.
void write_wav(const Waveform& w, const std::filesystem::path& path);

// Polyphase windowed-sinc resampler (Kaiser beta 8.6, 64 taps per phase).
// Equal rates return the input unchanged.
Waveform resample(const Waveform& w, int target_rate);

}  // namespace strev

#endif  // STREV_AUDIO_IO_H_
