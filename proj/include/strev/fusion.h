// include/strev/fusion.h

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

#ifndef STREV_FUSION_H_
#define STREV_FUSION_H_

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "strev/embedding.h"

namespace strev {

// Single-head cross-attention between the token grids of two embeddings.
// Each embedding of tokens * token_dim values is read row-major as a
// tokens x token_dim matrix.
struct CrossAttentionParams {
  int tokens = 8;
  int token_dim = 32;
  Eigen::MatrixXd query, key, value;  // token_dim x token_dim

  static CrossAttentionParams initialize(std::uint64_t seed, int tokens = 8,
                                         int token_dim = 32, double stddev = 0.02);
  static CrossAttentionParams zeros(int tokens = 8, int token_dim = 32);
};

enum class FusionMode { kWeighted, kCrossAttention };

struct FusionConfig {
  double alpha = 0.5;
  double beta = 0.5;
  FusionMode mode = FusionMode::kWeighted;
  std::optional<CrossAttentionParams> cross;
};

// alpha * s + beta * s_rev. Requires s.reversed == false, s_rev.reversed ==
// true (kInvalidArgument), equal dimensions (kShapeMismatch) and weights in
// [0, 1] (kInvalidArgument). The weights need not sum to one; (0, 0) yields
// the zero vector.
SpeakerEmbedding fuse_weighted(const SpeakerEmbedding& s, const SpeakerEmbedding& s_rev,
                               double alpha, double beta);

// fuse_weighted(s, s_rev, alpha, beta) + flatten(softmax(Q K^T / sqrt(k)) V)
// with Q from s and K, V from s_rev. Throws kInvalidArgument without params.
SpeakerEmbedding fuse_cross_attention(const SpeakerEmbedding& s,
                                      const SpeakerEmbedding& s_rev,
                                      const FusionConfig& cfg);

// Gradient of <grad_out, fuse_cross_attention(...)> with respect to the
// attention parameters.
CrossAttentionParams cross_attention_gradient(const SpeakerEmbedding& s,
                                              const SpeakerEmbedding& s_rev,
                                              const CrossAttentionParams& params,
                                              const Vector& grad_out);

// Dispatches on cfg.mode.
SpeakerEmbedding fuse(const SpeakerEmbedding& s, const SpeakerEmbedding& s_rev,
                      const FusionConfig& cfg);

struct FusionPoint {
  double alpha = 0.0;
  double beta = 0.0;
  SpeakerEmbedding fused;
};

// One fused embedding per (alpha, beta), in grid order. When cross is set the
// cross-attention variant is used at every point.
std::vector<FusionPoint> sweep_weights(
    const SpeakerEmbedding& s, const SpeakerEmbedding& s_rev,
    const std::vector<std::pair<double, double>>& grid,
    const std::optional<CrossAttentionParams>& cross = {});

}  // namespace strev

#endif  // STREV_FUSION_H_
