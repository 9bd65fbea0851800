// include/strev/reversal.h

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

#ifndef STREV_REVERSAL_H_
#define STREV_REVERSAL_H_

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "strev/audio_io.h"

namespace strev {

// A time-reversal strategy: the whole utterance, or contiguous fixed-length
// segments each reversed in place.
class ReversalSpec {
 public:
  enum class Mode { kFull, kWindowed };

  static ReversalSpec full() { return ReversalSpec(Mode::kFull, 0.0); }
  // Throws kInvalidArgument unless window_ms > 0.
  static ReversalSpec windowed(double window_ms);
  // Accepts "full" or a window length such as "20", "20ms" or "12.5ms".
  static ReversalSpec parse(std::string_view text);

  Mode mode() const { return mode_; }
  double window_ms() const { return window_ms_; }
  bool is_full() const { return mode_ == Mode::kFull; }

  // "full" or "<ms>ms", the form used in reports.
  std::string label() const;

  // Segment length in samples at the given rate, rounded to nearest.
  std::size_t segment_length(int sample_rate) const;

  bool operator==(const ReversalSpec&) const = default;

 private:
  ReversalSpec(Mode mode, double window_ms)
      : mode_(mode), window_ms_(window_ms) {}

  Mode mode_;
  double window_ms_;
};

// The strategy axis {10, 20, 50, 100, 200, 500 ms, full}.
std::vector<ReversalSpec> default_strategies();

// out[i] = in[N - 1 - i].
Waveform reverse_full(const Waveform& w);

// Reverses each contiguous segment of round(window_ms * rate / 1000) samples
// in place, including a shorter final segment. Throws kInvalidArgument when
// the window rounds to less than one sample.
Waveform reverse_windowed(const Waveform& w, double window_ms);

// Segment-length form used by reverse_windowed; segment >= 1.
void reverse_segments(std::vector<double>& samples, std::size_t segment);

Waveform apply_reversal(const Waveform& w, const ReversalSpec& spec);

}  // namespace strev

#endif  // STREV_REVERSAL_H_
