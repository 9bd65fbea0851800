// src/embedding.cc

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

#include "strev/embedding.h"

#include <algorithm>
#include <cmath>

#include "strev/error.h"

namespace strev {

namespace {

constexpr double kQuantileLevels[kStatsQuantileLevels] = {0.0, 0.2, 0.4,
                                                          0.6, 0.8, 1.0};

double quantile_sorted(const std::vector<double>& sorted, double q) {
  double pos = q * static_cast<double>(sorted.size() - 1);
  auto lo = static_cast<std::size_t>(std::floor(pos));
  std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  double frac = pos - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

}  // namespace

SpeakerEmbedding mel_stats_embed(const MelSpectrogram& mel) {
  const Eigen::Index frames = mel.values.rows();
  if (frames < 1)
    throw Error(ErrorCode::kInvalidArgument, "mel spectrogram has no frames");
  if (mel.values.cols() != kNumMels)
    throw Error(ErrorCode::kShapeMismatch,
                "mel statistics need " + std::to_string(kNumMels) + " bands, got " +
                    std::to_string(mel.values.cols()));

  SpeakerEmbedding emb;
  emb.values = Vector::Zero(kEmbeddingDim);
  std::vector<double> column(static_cast<std::size_t>(frames));

  for (int band = 0; band < kNumMels; ++band) {
    for (Eigen::Index t = 0; t < frames; ++t) column[t] = mel.values(t, band);
    std::sort(column.begin(), column.end());
    double sum = 0.0;
    for (double v : column) sum += v;
    const double mean = sum / frames;
    double sq = 0.0;
    for (double v : column) sq += (v - mean) * (v - mean);
    emb.values(kStatsMeanOffset + band) = mean;
    emb.values(kStatsStdOffset + band) = std::sqrt(sq / frames);
  }

  constexpr int kBandsPerGroup = kNumMels / kStatsQuantileGroups;
  for (int g = 0; g < kStatsQuantileGroups; ++g) {
    for (Eigen::Index t = 0; t < frames; ++t) {
      double acc = 0.0;
      for (int b = 0; b < kBandsPerGroup; ++b)
        acc += mel.values(t, g * kBandsPerGroup + b);
      column[t] = acc / kBandsPerGroup;
    }
    std::sort(column.begin(), column.end());
    for (int q = 0; q < kStatsQuantileLevels; ++q)
      emb.values(kStatsQuantileOffset + g * kStatsQuantileLevels + q) =
          quantile_sorted(column, kQuantileLevels[q]);
  }
  return emb;
}

SpeakerEmbedding utterance_embed_stats(const Waveform& w,
                                       const MelFrontend& frontend,
                                       const std::optional<ReversalSpec>& spec) {
  validate(w);
  SpeakerEmbedding emb = mel_stats_embed(
      frontend.compute(spec ? apply_reversal(w, *spec) : w));
  emb.source_id = w.id;
  emb.reversed = spec.has_value();
  return emb;
}

}  // namespace strev
