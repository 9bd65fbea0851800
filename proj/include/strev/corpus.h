// include/strev/corpus.h

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

#ifndef STREV_CORPUS_H_
#define STREV_CORPUS_H_

#include <cstdint>
#include <filesystem>

#include "strev/embedding.h"

namespace strev {

// Voice of one synthetic speaker: a harmonic source shaped by three formant
// resonances.
struct SyntheticVoice {
  double base_f0 = 120.0;
  double formants[3] = {500.0, 1500.0, 2500.0};
  double bandwidths[3] = {80.0, 120.0, 180.0};
  double tilt = 1.0;         // harmonic amplitude falls as k^-tilt
  double breathiness = 0.01;  // noise level relative to the harmonic part
};

SyntheticVoice synth_voice(std::size_t speaker, std::uint64_t seed);

// n_speakers voices with base F0 spread over 90-300 Hz. Utterances vary the
// F0 glide, syllabic envelope, formant trajectory and duration; durations are
// whole multiples of 20 ms. Speaker labels are "spkNN", ids "spkNN_uttMM".
// Utterance m of speaker n does not depend on the requested counts, so a
// larger corpus extends a smaller one with the same seed.
Corpus synth_corpus(int n_speakers, int utts_per_speaker, std::uint64_t seed);

// Every *.wav under dir (non-recursive, sorted by name), resampled to 16 kHz.
// The speaker label is the file stem up to the first '_'.
Corpus load_corpus_dir(const std::filesystem::path& dir);

// Writes <id>.wav for every utterance.
void write_corpus(const Corpus& corpus, const std::filesystem::path& dir);

}  // namespace strev

#endif  // STREV_CORPUS_H_
