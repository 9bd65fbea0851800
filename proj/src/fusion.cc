// src/fusion.cc

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

#include "strev/fusion.h"

#include <cmath>

#include "strev/error.h"
#include "strev/random.h"

namespace strev {

using Eigen::MatrixXd;

namespace {

void check_weight(double w, const char* name) {
  if (!(w >= 0.0 && w <= 1.0))
    throw Error(ErrorCode::kInvalidArgument,
                std::string("fusion weight ") + name + " must lie in [0, 1]");
}

using TokenGrid = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

TokenGrid as_tokens(const Vector& v, const CrossAttentionParams& p) {
  return Eigen::Map<const TokenGrid>(v.data(), p.tokens, p.token_dim);
}

void check_cross(const CrossAttentionParams& p, const SpeakerEmbedding& s) {
  if (p.tokens * p.token_dim != s.values.size())
    throw Error(ErrorCode::kShapeMismatch,
                "cross-attention grid does not match the embedding size");
  for (const MatrixXd* m : {&p.query, &p.key, &p.value})
    if (m->rows() != p.token_dim || m->cols() != p.token_dim)
      throw Error(ErrorCode::kShapeMismatch, "cross-attention weights must be token_dim square");
}

struct CrossForward {
  TokenGrid fwd, rev;
  MatrixXd q, k, v, attention, out;
};

CrossForward cross_forward(const SpeakerEmbedding& s, const SpeakerEmbedding& s_rev,
                           const CrossAttentionParams& p) {
  check_cross(p, s);
  CrossForward f;
  f.fwd = as_tokens(s.values, p);
  f.rev = as_tokens(s_rev.values, p);
  f.q = f.fwd * p.query;
  f.k = f.rev * p.key;
  f.v = f.rev * p.value;
  MatrixXd scores = f.q * f.k.transpose() / std::sqrt(static_cast<double>(p.token_dim));
  f.attention.resize(scores.rows(), scores.cols());
  for (Eigen::Index i = 0; i < scores.rows(); ++i) {
    double top = scores.row(i).maxCoeff();
    f.attention.row(i) = (scores.row(i).array() - top).exp().matrix();
    f.attention.row(i) /= f.attention.row(i).sum();
  }
  f.out = f.attention * f.v;
  return f;
}

}  // namespace

CrossAttentionParams CrossAttentionParams::initialize(std::uint64_t seed, int tokens,
                                                      int token_dim, double stddev) {
  CrossAttentionParams p = zeros(tokens, token_dim);
  Rng rng(mix_seed(seed, 0xF05E));
  for (MatrixXd* m : {&p.query, &p.key, &p.value})
    for (Eigen::Index i = 0; i < m->size(); ++i) m->data()[i] = stddev * rng.gaussian();
  return p;
}

CrossAttentionParams CrossAttentionParams::zeros(int tokens, int token_dim) {
  if (tokens <= 0 || token_dim <= 0)
    throw Error(ErrorCode::kInvalidArgument, "cross-attention grid must be positive");
  CrossAttentionParams p;
  p.tokens = tokens;
  p.token_dim = token_dim;
  p.query = MatrixXd::Zero(token_dim, token_dim);
  p.key = MatrixXd::Zero(token_dim, token_dim);
  p.value = MatrixXd::Zero(token_dim, token_dim);
  return p;
}

SpeakerEmbedding fuse_weighted(const SpeakerEmbedding& s, const SpeakerEmbedding& s_rev,
                               double alpha, double beta) {
  if (s.reversed || !s_rev.reversed)
    throw Error(ErrorCode::kInvalidArgument,
                "fusion expects a forward embedding and a reversed embedding");
  if (s.values.size() != s_rev.values.size())
    throw Error(ErrorCode::kShapeMismatch, "fused embeddings differ in dimension");
  check_weight(alpha, "alpha");
  check_weight(beta, "beta");
  SpeakerEmbedding out;
  out.source_id = s.source_id;
  out.reversed = false;
  out.values = alpha * s.values + beta * s_rev.values;
  return out;
}

SpeakerEmbedding fuse_cross_attention(const SpeakerEmbedding& s,
                                      const SpeakerEmbedding& s_rev,
                                      const FusionConfig& cfg) {
  if (!cfg.cross)
    throw Error(ErrorCode::kInvalidArgument, "cross-attention fusion without parameters");
  SpeakerEmbedding out = fuse_weighted(s, s_rev, cfg.alpha, cfg.beta);
  CrossForward f = cross_forward(s, s_rev, *cfg.cross);
  TokenGrid flat = f.out;
  out.values += Eigen::Map<const Vector>(flat.data(), flat.size());
  return out;
}

CrossAttentionParams cross_attention_gradient(const SpeakerEmbedding& s,
                                              const SpeakerEmbedding& s_rev,
                                              const CrossAttentionParams& params,
                                              const Vector& grad_out) {
  CrossForward f = cross_forward(s, s_rev, params);
  if (grad_out.size() != s.values.size())
    throw Error(ErrorCode::kShapeMismatch, "gradient size differs from embedding size");
  MatrixXd g_out = as_tokens(grad_out, params);
  MatrixXd g_att = g_out * f.v.transpose();
  MatrixXd g_v = f.attention.transpose() * g_out;
  Eigen::VectorXd row_dot = (g_att.array() * f.attention.array()).rowwise().sum();
  MatrixXd g_scores = (f.attention.array() * (g_att.colwise() - row_dot).array()).matrix() /
                      std::sqrt(static_cast<double>(params.token_dim));
  MatrixXd g_q = g_scores * f.k;
  MatrixXd g_k = g_scores.transpose() * f.q;

  CrossAttentionParams g = CrossAttentionParams::zeros(params.tokens, params.token_dim);
  g.query = f.fwd.transpose() * g_q;
  g.key = f.rev.transpose() * g_k;
  g.value = f.rev.transpose() * g_v;
  return g;
}

SpeakerEmbedding fuse(const SpeakerEmbedding& s, const SpeakerEmbedding& s_rev,
                      const FusionConfig& cfg) {
  if (cfg.mode == FusionMode::kCrossAttention) return fuse_cross_attention(s, s_rev, cfg);
  return fuse_weighted(s, s_rev, cfg.alpha, cfg.beta);
}

std::vector<FusionPoint> sweep_weights(const SpeakerEmbedding& s,
                                       const SpeakerEmbedding& s_rev,
                                       const std::vector<std::pair<double, double>>& grid,
                                       const std::optional<CrossAttentionParams>& cross) {
  if (grid.empty()) throw Error(ErrorCode::kInvalidArgument, "empty fusion grid");
  std::vector<FusionPoint> out;
  out.reserve(grid.size());
  for (const auto& [alpha, beta] : grid) {
    FusionConfig cfg;
    cfg.alpha = alpha;
    cfg.beta = beta;
    if (cross) {
      cfg.mode = FusionMode::kCrossAttention;
      cfg.cross = cross;
    }
    out.push_back({alpha, beta, fuse(s, s_rev, cfg)});
  }
  return out;
}

}  // namespace strev
