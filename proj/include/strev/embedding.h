// include/strev/embedding.h

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

#ifndef STREV_EMBEDDING_H_
#define STREV_EMBEDDING_H_

#include <optional>
#include <string>
#include <vector>

#include "strev/audio_io.h"
#include "strev/reversal.h"
#include "strev/spectral.h"

namespace strev {

constexpr int kEmbeddingDim = 256;

struct SpeakerEmbedding {
  Vector values;
  std::string source_id;
  // True when computed from time-reversed speech.
  bool reversed = false;
};

// Waveform with its speaker label.
struct LabelledWaveform {
  Waveform wave;
  std::string speaker;
};

using Corpus = std::vector<LabelledWaveform>;

// Layout of the mel-statistics embedding.
constexpr int kStatsQuantileGroups = 16;
constexpr int kStatsQuantileLevels = 6;
constexpr int kStatsMeanOffset = 0;
constexpr int kStatsStdOffset = kNumMels;
constexpr int kStatsQuantileOffset = 2 * kNumMels;
static_assert(kStatsQuantileOffset + kStatsQuantileGroups * kStatsQuantileLevels ==
              kEmbeddingDim);

// Deterministic utterance-level embedding from an 80-band log mel:
//   [0, 80)    per-band mean over frames
//   [80, 160)  per-band population standard deviation
//   [160, 256) quantiles {0, .2, .4, .6, .8, 1} of the mean log energy in
//              each of 16 groups of 5 adjacent bands
// Every statistic is computed from sorted values, so the result is
// bit-identical under any reordering of frames.
SpeakerEmbedding mel_stats_embed(const MelSpectrogram& mel);

// Optional reversal, log mel, mel-statistics embedding. The reversed flag is
// set whenever a reversal spec is given.
SpeakerEmbedding utterance_embed_stats(const Waveform& w,
                                       const MelFrontend& frontend,
                                       const std::optional<ReversalSpec>& spec = {});

}  // namespace strev

#endif  // STREV_EMBEDDING_H_
