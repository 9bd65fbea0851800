// include/strev/pitch.h

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

#ifndef STREV_PITCH_H_
#define STREV_PITCH_H_

#include <cstddef>
#include <vector>

#include "strev/audio_io.h"

namespace strev {

struct PitchConfig {
  double frame_ms = 40.0;
  double hop_ms = 20.0;
  double min_f0 = 50.0;
  double max_f0 = 600.0;
  // Frames whose best normalized autocorrelation falls below this are
  // unvoiced.
  double voicing_threshold = 0.5;
};

// f0[i] > 0 exactly when voiced[i].
struct PitchContour {
  std::vector<double> f0;
  std::vector<bool> voiced;
  int hop = 0;
  int sample_rate = kModelSampleRate;

  std::size_t num_frames() const { return f0.size(); }
  std::size_t num_voiced() const;
};

// Per-frame normalized autocorrelation pitch tracker. The chosen lag is the
// shortest local maximum within 90% of the best peak in the search band,
// refined by parabolic interpolation.
PitchContour estimate_f0(const Waveform& w, const PitchConfig& cfg = {});

// Z-score of log F0 over voiced frames; unvoiced frames are 0. A contour
// with zero log-F0 variance maps to all zeros. Throws kDegenerate when no
// frame is voiced.
std::vector<double> normalize_f0(const PitchContour& p);

// Pearson correlation of F0 over frames voiced in both contours. Throws
// kShapeMismatch on unequal frame counts and kDegenerate with fewer than two
// jointly voiced frames or zero variance.
double contour_correlation(const PitchContour& a, const PitchContour& b);

// Same contour with frame order reversed.
PitchContour reverse_frames(const PitchContour& p);

// Nearest-frame resampling to a new frame count.
PitchContour resample_frames(const PitchContour& p, std::size_t frames);

}  // namespace strev

#endif  // STREV_PITCH_H_
