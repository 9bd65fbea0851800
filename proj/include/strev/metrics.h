// include/strev/metrics.h

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

#ifndef STREV_METRICS_H_
#define STREV_METRICS_H_

#include <cstddef>
#include <cstdint>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "strev/embedding.h"
#include "strev/pitch.h"
#include "strev/spectral.h"

namespace strev {

// dot(a, b) / (|a| |b|), clamped to [-1, 1]. Throws kDegenerate for a
// zero-norm argument and kShapeMismatch for unequal sizes.
double cosine_similarity(const Vector& a, const Vector& b);
double cosine_similarity(const SpeakerEmbedding& a, const SpeakerEmbedding& b);

// Index pairs (generated, reference).
using Pairing = std::vector<std::pair<std::size_t, std::size_t>>;

// Mean cosine similarity over the pairs, summed in pairing order.
double speaker_similarity_score(const std::vector<SpeakerEmbedding>& generated,
                                const std::vector<SpeakerEmbedding>& reference,
                                const Pairing& pairing);

// Reconstructed source and filter mels; always the same shape.
class SourceFilterPair {
 public:
  // Throws kShapeMismatch for unequal shapes, kInvalidArgument for
  // non-finite entries.
  SourceFilterPair(Matrix z_src, Matrix z_ftr);

  const Matrix& source() const { return z_src_; }
  const Matrix& filter() const { return z_ftr_; }

 private:
  Matrix z_src_;
  Matrix z_ftr_;
};

// Zero-bias linear stand-ins for the source and filter encoders.
struct ToyEncoderParams {
  Eigen::MatrixXd pitch_to_mel;     // 1 x 80
  Eigen::MatrixXd source_embed;     // embedding_dim x 80
  Eigen::MatrixXd content_to_mel;   // 80 x 80
  Eigen::MatrixXd filter_embed;     // embedding_dim x 80

  static ToyEncoderParams initialize(std::uint64_t seed,
                                     int embedding_dim = kEmbeddingDim);
};

// Row t = f0n[t] * pitch_to_mel + s * source_embed, where f0n is the
// log-F0 z-score of the contour resampled to `frames` (all zero when no
// frame is voiced).
Matrix toy_source_encode(const PitchContour& pitch, const SpeakerEmbedding& s,
                         std::size_t frames, const ToyEncoderParams& params);

// Row t = mel[t] * content_to_mel + s_cmb * filter_embed.
Matrix toy_filter_encode(const MelSpectrogram& content, const SpeakerEmbedding& s_cmb,
                         const ToyEncoderParams& params);

// Mean absolute error between x_mel and z_src + z_ftr over all entries.
double reconstruction_l1(const Matrix& x_mel, const SourceFilterPair& pair);
double reconstruction_l1(const MelSpectrogram& x_mel, const SourceFilterPair& pair);

}  // namespace strev

#endif  // STREV_METRICS_H_
