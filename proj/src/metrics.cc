// src/metrics.cc

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

#include "strev/metrics.h"

#include <algorithm>
#include <cmath>

#include "strev/error.h"
#include "strev/random.h"

namespace strev {

using Eigen::MatrixXd;

double cosine_similarity(const Vector& a, const Vector& b) {
  if (a.size() != b.size())
    throw Error(ErrorCode::kShapeMismatch, "cosine similarity of unequal sizes");
  const double na = a.norm();
  const double nb = b.norm();
  if (!(na > 0.0) || !(nb > 0.0))
    throw Error(ErrorCode::kDegenerate, "cosine similarity of a zero-norm vector");
  return std::clamp(a.dot(b) / (na * nb), -1.0, 1.0);
}

double cosine_similarity(const SpeakerEmbedding& a, const SpeakerEmbedding& b) {
  return cosine_similarity(a.values, b.values);
}

double speaker_similarity_score(const std::vector<SpeakerEmbedding>& generated,
                                const std::vector<SpeakerEmbedding>& reference,
                                const Pairing& pairing) {
  if (pairing.empty())
    throw Error(ErrorCode::kInvalidArgument, "speaker similarity needs at least one pair");
  double sum = 0.0;
  for (const auto& [g, r] : pairing) {
    if (g >= generated.size() || r >= reference.size())
      throw Error(ErrorCode::kInvalidArgument, "pair index out of range");
    sum += cosine_similarity(generated[g], reference[r]);
  }
  return sum / static_cast<double>(pairing.size());
}

SourceFilterPair::SourceFilterPair(Matrix z_src, Matrix z_ftr)
    : z_src_(std::move(z_src)), z_ftr_(std::move(z_ftr)) {
  if (z_src_.rows() != z_ftr_.rows() || z_src_.cols() != z_ftr_.cols())
    throw Error(ErrorCode::kShapeMismatch, "source and filter mels differ in shape");
  if (!z_src_.allFinite() || !z_ftr_.allFinite())
    throw Error(ErrorCode::kInvalidArgument, "source/filter mels must be finite");
}

ToyEncoderParams ToyEncoderParams::initialize(std::uint64_t seed, int embedding_dim) {
  Rng rng(mix_seed(seed, 0x5F11));
  auto fill = [&](Eigen::Index rows, Eigen::Index cols, double stddev) {
    MatrixXd m(rows, cols);
    for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = stddev * rng.gaussian();
    return m;
  };
  ToyEncoderParams p;
  p.pitch_to_mel = fill(1, kNumMels, 1.0);
  p.source_embed = fill(embedding_dim, kNumMels, 1.0 / std::sqrt(embedding_dim));
  p.content_to_mel = fill(kNumMels, kNumMels, 1.0 / std::sqrt(kNumMels));
  p.filter_embed = fill(embedding_dim, kNumMels, 1.0 / std::sqrt(embedding_dim));
  return p;
}

Matrix toy_source_encode(const PitchContour& pitch, const SpeakerEmbedding& s,
                         std::size_t frames, const ToyEncoderParams& params) {
  if (frames == 0 || pitch.num_frames() == 0)
    throw Error(ErrorCode::kShapeMismatch, "source encoder needs a non-empty contour and frame count");
  if (s.values.size() != params.source_embed.rows())
    throw Error(ErrorCode::kShapeMismatch, "embedding size differs from source encoder");
  PitchContour aligned = resample_frames(pitch, frames);
  std::vector<double> f0n(frames, 0.0);
  if (aligned.num_voiced() > 0) f0n = normalize_f0(aligned);

  Eigen::RowVectorXd speaker = s.values.transpose() * params.source_embed;
  Matrix out(static_cast<Eigen::Index>(frames), kNumMels);
  for (std::size_t t = 0; t < frames; ++t)
    out.row(static_cast<Eigen::Index>(t)) = f0n[t] * params.pitch_to_mel.row(0) + speaker;
  return out;
}

Matrix toy_filter_encode(const MelSpectrogram& content, const SpeakerEmbedding& s_cmb,
                         const ToyEncoderParams& params) {
  if (content.values.cols() != params.content_to_mel.rows())
    throw Error(ErrorCode::kShapeMismatch, "content width differs from filter encoder");
  if (s_cmb.values.size() != params.filter_embed.rows())
    throw Error(ErrorCode::kShapeMismatch, "embedding size differs from filter encoder");
  Eigen::RowVectorXd speaker = s_cmb.values.transpose() * params.filter_embed;
  Matrix out = content.values * params.content_to_mel;
  out.rowwise() += speaker;
  return out;
}

double reconstruction_l1(const Matrix& x_mel, const SourceFilterPair& pair) {
  if (x_mel.rows() != pair.source().rows() || x_mel.cols() != pair.source().cols())
    throw Error(ErrorCode::kShapeMismatch, "target mel differs in shape from reconstruction");
  if (x_mel.size() == 0) return 0.0;
  return (x_mel - (pair.source() + pair.filter())).cwiseAbs().sum() /
         static_cast<double>(x_mel.size());
}

double reconstruction_l1(const MelSpectrogram& x_mel, const SourceFilterPair& pair) {
  return reconstruction_l1(x_mel.values, pair);
}

}  // namespace strev
