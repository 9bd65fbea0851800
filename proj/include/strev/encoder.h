// include/strev/encoder.h

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

#ifndef STREV_ENCODER_H_
#define STREV_ENCODER_H_

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "strev/embedding.h"

namespace strev {

struct EncoderDims {
  int input_dim = kNumMels;
  int model_dim = 64;
  int heads = 4;
  int output_dim = kEmbeddingDim;

  bool operator==(const EncoderDims&) const = default;
};

// Row-vector convention: a layer maps hidden states H (frames x d) to
// H W for each projection.
struct AttentionLayerParams {
  Eigen::MatrixXd query, key, value, output;  // d x d
};

// Speaking-style encoder: input projection, two residual multi-head
// self-attention layers, attentive statistics pooling, linear projection to
// output_dim. There is no positional encoding, so the encoder is a function
// of the set of frames.
struct EncoderParams {
  static constexpr int kLayers = 2;

  EncoderDims dims;
  double dropout = 0.1;
  std::uint64_t seed = 0;
  // Fixed input standardization (x - shift) / scale, fitted before training.
  double input_shift = 0.0;
  double input_scale = 1.0;

  Eigen::MatrixXd input_proj;  // input_dim x d
  Eigen::MatrixXd input_bias;  // 1 x d
  std::array<AttentionLayerParams, kLayers> layers;
  Eigen::MatrixXd pool_proj;    // d x d
  Eigen::MatrixXd pool_bias;    // 1 x d
  Eigen::MatrixXd pool_score;   // d x 1
  Eigen::MatrixXd output_proj;  // 2d x output_dim
  Eigen::MatrixXd output_bias;  // 1 x output_dim

  static EncoderParams initialize(const EncoderDims& dims, std::uint64_t seed,
                                  double dropout = 0.1);
  // Same shapes, all zeros.
  EncoderParams zeros_like() const;
  // Throws kShapeMismatch or kInvalidArgument on inconsistent shapes, heads
  // not dividing the model width, or non-finite values.
  void validate() const;

  // Trainable tensors in a fixed order.
  std::vector<std::pair<std::string, Eigen::MatrixXd*>> tensors();
  std::vector<std::pair<std::string, const Eigen::MatrixXd*>> tensors() const;
};

// Frames sorted lexicographically. The encoder runs on this canonical order
// so permuting input frames gives a bit-identical embedding.
Matrix canonical_frame_order(const Matrix& frames);

// Inference (dropout off). Throws kShapeMismatch if the mel width differs
// from dims.input_dim and kInvalidArgument for an empty mel.
SpeakerEmbedding attention_encode(const MelSpectrogram& mel, const EncoderParams& p);

struct ContrastiveLoss {
  double value = 0.0;
  std::vector<Vector> gradients;  // d value / d embedding, per input
};

// Cosine-margin contrastive objective over all pairs:
//   mean over same-label pairs of (1 - cos)
// + mean over cross-label pairs of max(0, cos - margin).
// Throws kDegenerate if either pair set is empty or an embedding has zero norm.
ContrastiveLoss contrastive_loss(const std::vector<Vector>& embeddings,
                                 const std::vector<int>& labels, double margin);

// Loss of the encoder on a labelled batch of mels (dropout off).
double encoder_loss(const EncoderParams& p, const std::vector<Matrix>& mels,
                    const std::vector<int>& labels, double margin);

// Analytic gradient of encoder_loss; returned with the shape of p.
std::pair<double, EncoderParams> encoder_loss_gradient(
    const EncoderParams& p, const std::vector<Matrix>& mels,
    const std::vector<int>& labels, double margin);

struct TrainConfig {
  int steps = 200;
  double learning_rate = 3e-3;
  double margin = 0.2;
  bool fit_input_normalization = true;
};

struct TrainResult {
  EncoderParams params;
  std::vector<double> loss_trace;  // one entry per step
};

// Full-batch Adam on contrastive_loss with dropout active. Deterministic for
// a given params.seed. Requires at least two speakers with two utterances
// each (kDegenerate otherwise). Zero steps returns the parameters unchanged.
TrainResult train_encoder(const Corpus& corpus, const EncoderParams& init,
                          const TrainConfig& cfg, const MelFrontend& frontend);

SpeakerEmbedding utterance_embed(const Waveform& w, const EncoderParams& p,
                                 const MelFrontend& frontend,
                                 const std::optional<ReversalSpec>& spec = {});

// JSON tensor dump: {"format": "strev-encoder", "format_version": 1, ...}.
void save_checkpoint(const EncoderParams& p, const std::filesystem::path& path);
EncoderParams load_checkpoint(const std::filesystem::path& path);

}  // namespace strev

#endif  // STREV_ENCODER_H_
