// src/reversal.cc

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

#include "strev/reversal.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <sstream>

#include "strev/error.h"

namespace strev {

ReversalSpec ReversalSpec::windowed(double window_ms) {
  if (!(window_ms > 0.0) || !std::isfinite(window_ms))
    throw Error(ErrorCode::kInvalidArgument,
                "reversal window must be a positive duration");
  return ReversalSpec(Mode::kWindowed, window_ms);
}

ReversalSpec ReversalSpec::parse(std::string_view text) {
  if (text == "full" || text == "Full" || text == "FULL") return full();
  std::string_view number = text;
  if (number.size() > 2 && number.substr(number.size() - 2) == "ms")
    number.remove_suffix(2);
  double ms = 0.0;
  auto [ptr, ec] =
      std::from_chars(number.data(), number.data() + number.size(), ms);
  if (ec != std::errc() || ptr != number.data() + number.size())
    throw Error(ErrorCode::kInvalidArgument,
                "cannot parse reversal strategy '" + std::string(text) + "'");
  return windowed(ms);
}

std::string ReversalSpec::label() const {
  if (is_full()) return "full";
  std::ostringstream os;
  os << window_ms_ << "ms";
  return os.str();
}

std::size_t ReversalSpec::segment_length(int sample_rate) const {
  double samples = std::round(window_ms_ * sample_rate / 1000.0);
  return samples < 1.0 ? 0 : static_cast<std::size_t>(samples);
}

std::vector<ReversalSpec> default_strategies() {
  std::vector<ReversalSpec> out;
  for (double ms : {10.0, 20.0, 50.0, 100.0, 200.0, 500.0})
    out.push_back(ReversalSpec::windowed(ms));
  out.push_back(ReversalSpec::full());
  return out;
}

Waveform reverse_full(const Waveform& w) {
  Waveform out = w;
  std::reverse(out.samples.begin(), out.samples.end());
  return out;
}

void reverse_segments(std::vector<double>& samples, std::size_t segment) {
  if (segment == 0)
    throw Error(ErrorCode::kInvalidArgument, "segment length must be >= 1");
  for (std::size_t start = 0; start < samples.size(); start += segment) {
    std::size_t end = std::min(samples.size(), start + segment);
    std::reverse(samples.begin() + static_cast<std::ptrdiff_t>(start),
                 samples.begin() + static_cast<std::ptrdiff_t>(end));
  }
}

Waveform reverse_windowed(const Waveform& w, double window_ms) {
  std::size_t segment = ReversalSpec::windowed(window_ms).segment_length(w.sample_rate);
  if (segment == 0)
    throw Error(ErrorCode::kInvalidArgument,
                "reversal window of " + std::to_string(window_ms) +
                    " ms is shorter than one sample at " +
                    std::to_string(w.sample_rate) + " Hz");
  Waveform out = w;
  reverse_segments(out.samples, segment);
  return out;
}

Waveform apply_reversal(const Waveform& w, const ReversalSpec& spec) {
  if (spec.is_full()) return reverse_full(w);
  return reverse_windowed(w, spec.window_ms());
}

}  // namespace strev
