// src/pitch.cc

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

#include "strev/pitch.h"

#include <algorithm>
#include <cmath>

#include "strev/error.h"

namespace strev {

namespace {

// Normalized cross-correlation of frame[0 : L - lag] with frame[lag : L].
double normalized_autocorrelation(const double* x, int length, int lag) {
  double cross = 0.0, head = 0.0, tail = 0.0;
  for (int n = 0; n + lag < length; ++n) {
    cross += x[n] * x[n + lag];
    head += x[n] * x[n];
    tail += x[n + lag] * x[n + lag];
  }
  double denom = std::sqrt(head * tail);
  if (!(denom > 1e-300)) return 0.0;
  return cross / denom;
}

}  // namespace

std::size_t PitchContour::num_voiced() const {
  return static_cast<std::size_t>(std::count(voiced.begin(), voiced.end(), true));
}

PitchContour estimate_f0(const Waveform& w, const PitchConfig& cfg) {
  validate(w);
  const int rate = w.sample_rate;
  const int frame_len = static_cast<int>(std::lround(cfg.frame_ms * rate / 1000.0));
  const int hop = static_cast<int>(std::lround(cfg.hop_ms * rate / 1000.0));
  if (!(cfg.min_f0 > 0.0 && cfg.min_f0 < cfg.max_f0))
    throw Error(ErrorCode::kInvalidArgument, "pitch band must satisfy 0 < min < max");
  if (hop < 1) throw Error(ErrorCode::kInvalidArgument, "pitch hop below one sample");
  const int lag_min = std::max(1, static_cast<int>(std::floor(rate / cfg.max_f0)));
  const int lag_max = static_cast<int>(std::ceil(rate / cfg.min_f0));
  if (frame_len < 2 * lag_max)
    throw Error(ErrorCode::kInvalidArgument,
                "pitch frame must span two periods of the lowest F0");

  const long n = static_cast<long>(w.samples.size());
  const long frames = n >= frame_len ? 1 + (n - frame_len) / hop : 1;

  PitchContour out;
  out.hop = hop;
  out.sample_rate = rate;
  out.f0.assign(static_cast<std::size_t>(frames), 0.0);
  out.voiced.assign(static_cast<std::size_t>(frames), false);

  std::vector<double> frame(static_cast<std::size_t>(frame_len));
  // r[k] holds the correlation at lag (lag_min - 1 + k).
  std::vector<double> r(static_cast<std::size_t>(lag_max - lag_min + 3));
  for (long f = 0; f < frames; ++f) {
    long start = f * hop;
    for (int i = 0; i < frame_len; ++i) {
      long idx = start + i;
      frame[i] = idx < n ? w.samples[idx] : 0.0;
    }
    for (int lag = lag_min - 1; lag <= lag_max + 1; ++lag)
      r[lag - lag_min + 1] =
          lag >= 1 ? normalized_autocorrelation(frame.data(), frame_len, lag) : 0.0;

    double best = 0.0;
    for (int lag = lag_min; lag <= lag_max; ++lag)
      best = std::max(best, r[lag - lag_min + 1]);
    if (best < cfg.voicing_threshold) continue;

    int chosen = -1;
    for (int lag = lag_min; lag <= lag_max; ++lag) {
      double c = r[lag - lag_min + 1];
      if (c >= 0.9 * best && c >= r[lag - lag_min] && c >= r[lag - lag_min + 2]) {
        chosen = lag;
        break;
      }
    }
    if (chosen < 0) continue;

    double prev = r[chosen - lag_min], cur = r[chosen - lag_min + 1],
           next = r[chosen - lag_min + 2];
    double curvature = prev - 2.0 * cur + next;
    double shift = curvature < 0.0 ? 0.5 * (prev - next) / curvature : 0.0;
    shift = std::clamp(shift, -0.5, 0.5);
    double f0 = rate / (chosen + shift);
    if (f0 < cfg.min_f0 || f0 > cfg.max_f0) continue;
    out.f0[f] = f0;
    out.voiced[f] = true;
  }
  return out;
}

std::vector<double> normalize_f0(const PitchContour& p) {
  std::size_t count = 0;
  double sum = 0.0;
  for (std::size_t i = 0; i < p.num_frames(); ++i) {
    if (!p.voiced[i]) continue;
    sum += std::log(p.f0[i]);
    ++count;
  }
  if (count == 0)
    throw Error(ErrorCode::kDegenerate, "cannot normalize a contour with no voiced frames");
  const double mean = sum / count;
  double var = 0.0;
  for (std::size_t i = 0; i < p.num_frames(); ++i)
    if (p.voiced[i]) var += (std::log(p.f0[i]) - mean) * (std::log(p.f0[i]) - mean);
  const double sd = std::sqrt(var / count);

  std::vector<double> out(p.num_frames(), 0.0);
  if (sd < 1e-12) return out;
  for (std::size_t i = 0; i < p.num_frames(); ++i)
    if (p.voiced[i]) out[i] = (std::log(p.f0[i]) - mean) / sd;
  return out;
}

double contour_correlation(const PitchContour& a, const PitchContour& b) {
  if (a.num_frames() != b.num_frames())
    throw Error(ErrorCode::kShapeMismatch,
                "contours have " + std::to_string(a.num_frames()) + " and " +
                    std::to_string(b.num_frames()) + " frames");
  std::vector<double> xs, ys;
  for (std::size_t i = 0; i < a.num_frames(); ++i) {
    if (a.voiced[i] && b.voiced[i]) {
      xs.push_back(a.f0[i]);
      ys.push_back(b.f0[i]);
    }
  }
  if (xs.size() < 2)
    throw Error(ErrorCode::kDegenerate, "fewer than two jointly voiced frames");
  const double n = static_cast<double>(xs.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxy += (xs[i] - mx) * (ys[i] - my);
    sxx += (xs[i] - mx) * (xs[i] - mx);
    syy += (ys[i] - my) * (ys[i] - my);
  }
  if (!(sxx > 0.0 && syy > 0.0))
    throw Error(ErrorCode::kDegenerate, "F0 contour has zero variance");
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

PitchContour reverse_frames(const PitchContour& p) {
  PitchContour out = p;
  std::reverse(out.f0.begin(), out.f0.end());
  std::reverse(out.voiced.begin(), out.voiced.end());
  return out;
}

PitchContour resample_frames(const PitchContour& p, std::size_t frames) {
  if (p.num_frames() == 0 || frames == 0)
    throw Error(ErrorCode::kShapeMismatch, "cannot resample an empty contour");
  PitchContour out;
  out.hop = p.hop;
  out.sample_rate = p.sample_rate;
  out.f0.resize(frames);
  out.voiced.resize(frames);
  const double ratio = static_cast<double>(p.num_frames()) / frames;
  for (std::size_t i = 0; i < frames; ++i) {
    std::size_t src = std::min(p.num_frames() - 1,
                               static_cast<std::size_t>((i + 0.5) * ratio));
    out.f0[i] = p.f0[src];
    out.voiced[i] = p.voiced[src];
  }
  return out;
}

}  // namespace strev
