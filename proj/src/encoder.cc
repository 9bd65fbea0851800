// src/encoder.cc

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

#include "strev/encoder.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <numbers>
#include <numeric>

#include <json.hpp>

#include "strev/error.h"
#include "strev/random.h"

namespace strev {

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::RowVectorXd;
using Eigen::VectorXd;

namespace {

constexpr double kPoolEps = 1e-6;
constexpr int kCheckpointVersion = 1;

MatrixXd gaussian_matrix(Index rows, Index cols, double stddev, Rng& rng) {
  MatrixXd m(rows, cols);
  for (Index r = 0; r < rows; ++r)
    for (Index c = 0; c < cols; ++c) m(r, c) = stddev * rng.gaussian();
  return m;
}

MatrixXd row_softmax(const MatrixXd& s) {
  MatrixXd a(s.rows(), s.cols());
  for (Index i = 0; i < s.rows(); ++i) {
    double top = s.row(i).maxCoeff();
    a.row(i) = (s.row(i).array() - top).exp().matrix();
    a.row(i) /= a.row(i).sum();
  }
  return a;
}

VectorXd softmax(const VectorXd& e) {
  double top = e.maxCoeff();
  VectorXd a = (e.array() - top).exp().matrix();
  return a / a.sum();
}

struct LayerCache {
  MatrixXd input, q, k, v, concat, mask;
  std::vector<MatrixXd> attention;  // per head, frames x frames
};

struct ForwardCache {
  MatrixXd x;
  std::array<LayerCache, EncoderParams::kLayers> layers;
  MatrixXd hidden, scores_hidden;
  VectorXd alpha;
  RowVectorXd mu, sigma, pooled;
};

// Forward pass on frames in the given order. A non-null rng enables dropout
// on each attention block's output.
RowVectorXd forward(const EncoderParams& p, const Matrix& frames,
                    ForwardCache* cache, Rng* rng) {
  const int d = p.dims.model_dim;
  const int heads = p.dims.heads;
  const int dh = d / heads;
  const double att_scale = 1.0 / std::sqrt(static_cast<double>(dh));

  MatrixXd x = ((frames.array() - p.input_shift) / p.input_scale).matrix();
  MatrixXd hid = x * p.input_proj;
  hid.rowwise() += p.input_bias.row(0);
  const Index t = hid.rows();

  for (int l = 0; l < EncoderParams::kLayers; ++l) {
    const AttentionLayerParams& lp = p.layers[l];
    MatrixXd q = hid * lp.query;
    MatrixXd k = hid * lp.key;
    MatrixXd v = hid * lp.value;
    MatrixXd concat(t, d);
    std::vector<MatrixXd> attention;
    for (int h = 0; h < heads; ++h) {
      MatrixXd a = row_softmax(q.middleCols(h * dh, dh) *
                               k.middleCols(h * dh, dh).transpose() * att_scale);
      concat.middleCols(h * dh, dh) = a * v.middleCols(h * dh, dh);
      if (cache) attention.push_back(std::move(a));
    }
    MatrixXd mixed = concat * lp.output;
    MatrixXd mask;
    if (rng && p.dropout > 0.0) {
      mask.resize(t, d);
      const double keep = 1.0 / (1.0 - p.dropout);
      for (Index i = 0; i < t; ++i)
        for (Index j = 0; j < d; ++j)
          mask(i, j) = rng->uniform() < p.dropout ? 0.0 : keep;
      mixed = mixed.cwiseProduct(mask);
    }
    if (cache) {
      LayerCache& lc = cache->layers[l];
      lc.input = hid;
      lc.q = std::move(q);
      lc.k = std::move(k);
      lc.v = std::move(v);
      lc.concat = std::move(concat);
      lc.mask = std::move(mask);
      lc.attention = std::move(attention);
    }
    hid += mixed;
  }

  MatrixXd z = hid * p.pool_proj;
  z.rowwise() += p.pool_bias.row(0);
  MatrixXd u = z.array().tanh().matrix();
  VectorXd alpha = softmax(u * p.pool_score.col(0));
  RowVectorXd mu = alpha.transpose() * hid;
  MatrixXd centered = hid.rowwise() - mu;
  RowVectorXd var = alpha.transpose() * centered.array().square().matrix();
  RowVectorXd sigma = (var.array() + kPoolEps).sqrt().matrix();
  RowVectorXd pooled(2 * d);
  pooled << mu, sigma;
  RowVectorXd y = pooled * p.output_proj + p.output_bias.row(0);

  if (cache) {
    cache->x = std::move(x);
    cache->hidden = std::move(hid);
    cache->scores_hidden = std::move(u);
    cache->alpha = std::move(alpha);
    cache->mu = std::move(mu);
    cache->sigma = std::move(sigma);
    cache->pooled = std::move(pooled);
  }
  return y;
}

// Accumulates d loss / d params into grad given d loss / d output.
void backward(const EncoderParams& p, const ForwardCache& c,
              const RowVectorXd& grad_out, EncoderParams& grad) {
  const int d = p.dims.model_dim;
  const int heads = p.dims.heads;
  const int dh = d / heads;
  const double att_scale = 1.0 / std::sqrt(static_cast<double>(dh));

  grad.output_proj.noalias() += c.pooled.transpose() * grad_out;
  grad.output_bias.row(0) += grad_out;
  RowVectorXd grad_pooled = grad_out * p.output_proj.transpose();
  RowVectorXd grad_mu = grad_pooled.head(d);
  RowVectorXd grad_var =
      (grad_pooled.tail(d).array() / (2.0 * c.sigma.array())).matrix();

  const MatrixXd& hid = c.hidden;
  MatrixXd centered = hid.rowwise() - c.mu;
  // var = sum_t alpha_t (h_t - mu)^2; the mu path vanishes since sum alpha = 1.
  MatrixXd grad_hid =
      2.0 * c.alpha.asDiagonal() * (centered.array().rowwise() * grad_var.array()).matrix();
  grad_hid.noalias() += c.alpha * grad_mu;
  VectorXd grad_alpha = centered.array().square().matrix() * grad_var.transpose();
  grad_alpha.noalias() += hid * grad_mu.transpose();

  VectorXd grad_e =
      c.alpha.cwiseProduct((grad_alpha.array() - c.alpha.dot(grad_alpha)).matrix());
  const MatrixXd& u = c.scores_hidden;
  grad.pool_score.noalias() += u.transpose() * grad_e;
  MatrixXd grad_z = ((grad_e * p.pool_score.transpose()).array() *
                     (1.0 - u.array().square()))
                        .matrix();
  grad.pool_proj.noalias() += hid.transpose() * grad_z;
  grad.pool_bias.row(0) += grad_z.colwise().sum();
  grad_hid.noalias() += grad_z * p.pool_proj.transpose();

  for (int l = EncoderParams::kLayers - 1; l >= 0; --l) {
    const AttentionLayerParams& lp = p.layers[l];
    AttentionLayerParams& gl = grad.layers[l];
    const LayerCache& lc = c.layers[l];
    MatrixXd grad_mixed =
        lc.mask.size() ? grad_hid.cwiseProduct(lc.mask) : grad_hid;
    gl.output.noalias() += lc.concat.transpose() * grad_mixed;
    MatrixXd grad_concat = grad_mixed * lp.output.transpose();

    const Index t = hid.rows();
    MatrixXd grad_q(t, d), grad_k(t, d), grad_v(t, d);
    for (int h = 0; h < heads; ++h) {
      const MatrixXd& a = lc.attention[h];
      auto go = grad_concat.middleCols(h * dh, dh);
      MatrixXd grad_a = go * lc.v.middleCols(h * dh, dh).transpose();
      grad_v.middleCols(h * dh, dh) = a.transpose() * go;
      VectorXd row_dot = (grad_a.array() * a.array()).rowwise().sum();
      MatrixXd grad_s =
          (a.array() * (grad_a.colwise() - row_dot).array()).matrix() * att_scale;
      grad_q.middleCols(h * dh, dh) = grad_s * lc.k.middleCols(h * dh, dh);
      grad_k.middleCols(h * dh, dh) =
          grad_s.transpose() * lc.q.middleCols(h * dh, dh);
    }
    gl.query.noalias() += lc.input.transpose() * grad_q;
    gl.key.noalias() += lc.input.transpose() * grad_k;
    gl.value.noalias() += lc.input.transpose() * grad_v;
    grad_hid.noalias() += grad_q * lp.query.transpose();
    grad_hid.noalias() += grad_k * lp.key.transpose();
    grad_hid.noalias() += grad_v * lp.value.transpose();
  }

  grad.input_proj.noalias() += c.x.transpose() * grad_hid;
  grad.input_bias.row(0) += grad_hid.colwise().sum();
}

void check_mel(const EncoderParams& p, const Matrix& frames) {
  if (frames.rows() < 1)
    throw Error(ErrorCode::kInvalidArgument, "encoder input has no frames");
  if (frames.cols() != p.dims.input_dim)
    throw Error(ErrorCode::kShapeMismatch,
                "encoder expects " + std::to_string(p.dims.input_dim) +
                    " input features, got " + std::to_string(frames.cols()));
}

}  // namespace

EncoderParams EncoderParams::initialize(const EncoderDims& dims,
                                        std::uint64_t seed, double dropout) {
  EncoderParams p;
  p.dims = dims;
  p.seed = seed;
  p.dropout = dropout;
  if (dims.model_dim <= 0 || dims.heads <= 0 || dims.model_dim % dims.heads != 0 ||
      dims.input_dim <= 0 || dims.output_dim <= 0)
    throw Error(ErrorCode::kInvalidArgument,
                "encoder dims must be positive with heads dividing model_dim");
  const int d = dims.model_dim;
  Rng rng(mix_seed(seed, 0xE1C0DE));
  p.input_proj = gaussian_matrix(dims.input_dim, d, 1.0 / std::sqrt(dims.input_dim), rng);
  p.input_bias = MatrixXd::Zero(1, d);
  const double s = 1.0 / std::sqrt(static_cast<double>(d));
  for (auto& layer : p.layers) {
    layer.query = gaussian_matrix(d, d, s, rng);
    layer.key = gaussian_matrix(d, d, s, rng);
    layer.value = gaussian_matrix(d, d, s, rng);
    layer.output = gaussian_matrix(d, d, 0.5 * s, rng);
  }
  p.pool_proj = gaussian_matrix(d, d, s, rng);
  p.pool_bias = MatrixXd::Zero(1, d);
  p.pool_score = gaussian_matrix(d, 1, s, rng);
  p.output_proj = gaussian_matrix(2 * d, dims.output_dim,
                                  1.0 / std::sqrt(2.0 * d), rng);
  p.output_bias = MatrixXd::Zero(1, dims.output_dim);
  return p;
}

EncoderParams EncoderParams::zeros_like() const {
  EncoderParams z = *this;
  for (auto& [name, t] : z.tensors()) t->setZero();
  return z;
}

std::vector<std::pair<std::string, MatrixXd*>> EncoderParams::tensors() {
  std::vector<std::pair<std::string, MatrixXd*>> out = {
      {"input_proj", &input_proj}, {"input_bias", &input_bias}};
  for (int l = 0; l < kLayers; ++l) {
    std::string prefix = "layer" + std::to_string(l) + ".";
    out.emplace_back(prefix + "query", &layers[l].query);
    out.emplace_back(prefix + "key", &layers[l].key);
    out.emplace_back(prefix + "value", &layers[l].value);
    out.emplace_back(prefix + "output", &layers[l].output);
  }
  out.emplace_back("pool_proj", &pool_proj);
  out.emplace_back("pool_bias", &pool_bias);
  out.emplace_back("pool_score", &pool_score);
  out.emplace_back("output_proj", &output_proj);
  out.emplace_back("output_bias", &output_bias);
  return out;
}

std::vector<std::pair<std::string, const MatrixXd*>> EncoderParams::tensors() const {
  std::vector<std::pair<std::string, const MatrixXd*>> out;
  for (auto& [name, t] : const_cast<EncoderParams*>(this)->tensors())
    out.emplace_back(name, t);
  return out;
}

void EncoderParams::validate() const {
  const int d = dims.model_dim;
  if (d <= 0 || dims.heads <= 0 || d % dims.heads != 0)
    throw Error(ErrorCode::kInvalidArgument, "heads must divide model_dim");
  if (!(input_scale > 0.0) || !std::isfinite(input_shift))
    throw Error(ErrorCode::kInvalidArgument, "invalid input normalization");
  if (!(dropout >= 0.0 && dropout < 1.0))
    throw Error(ErrorCode::kInvalidArgument, "dropout must lie in [0, 1)");
  std::map<std::string, std::pair<Index, Index>> expected = {
      {"input_proj", {dims.input_dim, d}}, {"input_bias", {1, d}},
      {"pool_proj", {d, d}},               {"pool_bias", {1, d}},
      {"pool_score", {d, 1}},              {"output_proj", {2 * d, dims.output_dim}},
      {"output_bias", {1, dims.output_dim}}};
  for (int l = 0; l < kLayers; ++l)
    for (const char* n : {"query", "key", "value", "output"})
      expected["layer" + std::to_string(l) + "." + n] = {d, d};
  for (const auto& [name, t] : tensors()) {
    auto [rows, cols] = expected.at(name);
    if (t->rows() != rows || t->cols() != cols)
      throw Error(ErrorCode::kShapeMismatch,
                  "tensor " + name + " is " + std::to_string(t->rows()) + "x" +
                      std::to_string(t->cols()) + ", expected " +
                      std::to_string(rows) + "x" + std::to_string(cols));
    if (!t->allFinite())
      throw Error(ErrorCode::kInvalidArgument, "tensor " + name + " is not finite");
  }
}

Matrix canonical_frame_order(const Matrix& frames) {
  std::vector<Index> order(static_cast<std::size_t>(frames.rows()));
  std::iota(order.begin(), order.end(), Index{0});
  std::stable_sort(order.begin(), order.end(), [&](Index a, Index b) {
    const double* ra = frames.row(a).data();
    const double* rb = frames.row(b).data();
    return std::lexicographical_compare(ra, ra + frames.cols(), rb, rb + frames.cols());
  });
  Matrix out(frames.rows(), frames.cols());
  for (std::size_t i = 0; i < order.size(); ++i) out.row(static_cast<Index>(i)) = frames.row(order[i]);
  return out;
}

SpeakerEmbedding attention_encode(const MelSpectrogram& mel, const EncoderParams& p) {
  check_mel(p, mel.values);
  SpeakerEmbedding emb;
  emb.values = forward(p, canonical_frame_order(mel.values), nullptr, nullptr).transpose();
  return emb;
}

ContrastiveLoss contrastive_loss(const std::vector<Vector>& embeddings,
                                 const std::vector<int>& labels, double margin) {
  const std::size_t n = embeddings.size();
  if (labels.size() != n)
    throw Error(ErrorCode::kShapeMismatch, "one label per embedding required");
  std::vector<double> norms(n);
  for (std::size_t i = 0; i < n; ++i) {
    norms[i] = embeddings[i].norm();
    if (!(norms[i] > 0.0))
      throw Error(ErrorCode::kDegenerate, "zero-norm embedding in contrastive loss");
  }
  std::size_t same = 0, cross = 0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) (labels[i] == labels[j] ? same : cross)++;
  if (same == 0 || cross == 0)
    throw Error(ErrorCode::kDegenerate,
                "contrastive loss needs same-speaker and cross-speaker pairs");

  ContrastiveLoss out;
  out.gradients.assign(n, Vector::Zero(embeddings.empty() ? 0 : embeddings[0].size()));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double cos = embeddings[i].dot(embeddings[j]) / (norms[i] * norms[j]);
      double weight = 0.0;
      if (labels[i] == labels[j]) {
        out.value += (1.0 - cos) / same;
        weight = -1.0 / same;
      } else if (cos > margin) {
        out.value += (cos - margin) / cross;
        weight = 1.0 / cross;
      }
      if (weight == 0.0) continue;
      out.gradients[i] += weight * (embeddings[j] / (norms[i] * norms[j]) -
                                    cos * embeddings[i] / (norms[i] * norms[i]));
      out.gradients[j] += weight * (embeddings[i] / (norms[i] * norms[j]) -
                                    cos * embeddings[j] / (norms[j] * norms[j]));
    }
  }
  return out;
}

double encoder_loss(const EncoderParams& p, const std::vector<Matrix>& mels,
                    const std::vector<int>& labels, double margin) {
  std::vector<Vector> embeddings;
  for (const Matrix& m : mels) {
    check_mel(p, m);
    embeddings.push_back(forward(p, m, nullptr, nullptr).transpose());
  }
  return contrastive_loss(embeddings, labels, margin).value;
}

namespace {

std::pair<double, EncoderParams> loss_gradient(const EncoderParams& p,
                                               const std::vector<Matrix>& mels,
                                               const std::vector<int>& labels,
                                               double margin, Rng* rng) {
  std::vector<ForwardCache> caches(mels.size());
  std::vector<Vector> embeddings;
  for (std::size_t i = 0; i < mels.size(); ++i) {
    check_mel(p, mels[i]);
    embeddings.push_back(forward(p, mels[i], &caches[i], rng).transpose());
  }
  ContrastiveLoss loss = contrastive_loss(embeddings, labels, margin);
  EncoderParams grad = p.zeros_like();
  for (std::size_t i = 0; i < mels.size(); ++i)
    backward(p, caches[i], loss.gradients[i].transpose(), grad);
  return {loss.value, std::move(grad)};
}

}  // namespace

std::pair<double, EncoderParams> encoder_loss_gradient(
    const EncoderParams& p, const std::vector<Matrix>& mels,
    const std::vector<int>& labels, double margin) {
  return loss_gradient(p, mels, labels, margin, nullptr);
}

TrainResult train_encoder(const Corpus& corpus, const EncoderParams& init,
                          const TrainConfig& cfg, const MelFrontend& frontend) {
  init.validate();
  if (cfg.steps < 0)
    throw Error(ErrorCode::kInvalidArgument, "negative training step count");
  std::map<std::string, int> speaker_ids;
  std::map<std::string, int> counts;
  for (const auto& u : corpus) counts[u.speaker]++;
  for (const auto& [speaker, count] : counts) {
    if (count < 2)
      throw Error(ErrorCode::kDegenerate,
                  "speaker '" + speaker + "' has fewer than two utterances");
    speaker_ids.emplace(speaker, static_cast<int>(speaker_ids.size()));
  }
  if (speaker_ids.size() < 2)
    throw Error(ErrorCode::kDegenerate, "training needs at least two speakers");

  TrainResult result{init, {}};
  if (cfg.steps == 0) return result;

  std::vector<Matrix> mels;
  std::vector<int> labels;
  for (const auto& u : corpus) {
    mels.push_back(canonical_frame_order(frontend.compute(u.wave).values));
    labels.push_back(speaker_ids.at(u.speaker));
  }

  EncoderParams& p = result.params;
  if (cfg.fit_input_normalization) {
    double sum = 0.0, sq = 0.0, count = 0.0;
    for (const Matrix& m : mels) {
      sum += m.sum();
      sq += m.array().square().sum();
      count += static_cast<double>(m.size());
    }
    double mean = sum / count;
    double var = std::max(sq / count - mean * mean, 0.0);
    p.input_shift = mean;
    p.input_scale = var > 0.0 ? std::sqrt(var) : 1.0;
  }

  constexpr double kBeta1 = 0.9, kBeta2 = 0.999, kEps = 1e-8;
  EncoderParams m1 = p.zeros_like(), m2 = p.zeros_like();
  auto params = p.tensors();
  auto first = m1.tensors();
  auto second = m2.tensors();
  for (int step = 0; step < cfg.steps; ++step) {
    Rng rng(mix_seed(p.seed, static_cast<std::uint64_t>(step)));
    auto [loss, grad] = loss_gradient(p, mels, labels, cfg.margin, &rng);
    result.loss_trace.push_back(loss);
    auto grads = grad.tensors();
    const double c1 = 1.0 - std::pow(kBeta1, step + 1);
    const double c2 = 1.0 - std::pow(kBeta2, step + 1);
    // Cosine decay of the step size towards zero.
    const double lr = 0.5 * cfg.learning_rate *
                      (1.0 + std::cos(std::numbers::pi * step / cfg.steps));
    for (std::size_t i = 0; i < params.size(); ++i) {
      MatrixXd& g = *grads[i].second;
      MatrixXd& a = *first[i].second;
      MatrixXd& b = *second[i].second;
      a = kBeta1 * a + (1.0 - kBeta1) * g;
      b = kBeta2 * b + (1.0 - kBeta2) * g.cwiseProduct(g);
      *params[i].second -= (lr * (a.array() / c1) /
                            ((b.array() / c2).sqrt() + kEps))
                               .matrix();
    }
  }
  return result;
}

SpeakerEmbedding utterance_embed(const Waveform& w, const EncoderParams& p,
                                 const MelFrontend& frontend,
                                 const std::optional<ReversalSpec>& spec) {
  validate(w);
  SpeakerEmbedding emb =
      attention_encode(frontend.compute(spec ? apply_reversal(w, *spec) : w), p);
  emb.source_id = w.id;
  emb.reversed = spec.has_value();
  return emb;
}

void save_checkpoint(const EncoderParams& p, const std::filesystem::path& path) {
  p.validate();
  nlohmann::json j;
  j["format"] = "strev-encoder";
  j["format_version"] = kCheckpointVersion;
  j["dims"] = {{"input_dim", p.dims.input_dim},
               {"model_dim", p.dims.model_dim},
               {"heads", p.dims.heads},
               {"output_dim", p.dims.output_dim}};
  j["dropout"] = p.dropout;
  j["seed"] = p.seed;
  j["input_shift"] = p.input_shift;
  j["input_scale"] = p.input_scale;
  nlohmann::json tensors = nlohmann::json::array();
  for (const auto& [name, t] : p.tensors()) {
    std::vector<double> data;
    data.reserve(static_cast<std::size_t>(t->size()));
    for (Index r = 0; r < t->rows(); ++r)
      for (Index c = 0; c < t->cols(); ++c) data.push_back((*t)(r, c));
    tensors.push_back({{"name", name}, {"shape", {t->rows(), t->cols()}}, {"data", data}});
  }
  j["tensors"] = std::move(tensors);
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::kIo, "cannot write " + path.string());
  out << j.dump() << '\n';
  if (!out) throw Error(ErrorCode::kIo, "write failed for " + path.string());
}

EncoderParams load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kMissingFile, "cannot open " + path.string());
  try {
    nlohmann::json j = nlohmann::json::parse(in);
    if (j.at("format") != "strev-encoder")
      throw Error(ErrorCode::kMalformedHeader, path.string() + ": not an encoder checkpoint");
    if (j.at("format_version").get<int>() != kCheckpointVersion)
      throw Error(ErrorCode::kUnsupportedEncoding,
                  path.string() + ": unsupported checkpoint version");
    EncoderDims dims;
    const auto& jd = j.at("dims");
    dims.input_dim = jd.at("input_dim").get<int>();
    dims.model_dim = jd.at("model_dim").get<int>();
    dims.heads = jd.at("heads").get<int>();
    dims.output_dim = jd.at("output_dim").get<int>();
    EncoderParams p = EncoderParams::initialize(dims, j.at("seed").get<std::uint64_t>(),
                                                j.at("dropout").get<double>());
    p.input_shift = j.at("input_shift").get<double>();
    p.input_scale = j.at("input_scale").get<double>();
    std::map<std::string, const nlohmann::json*> by_name;
    for (const auto& t : j.at("tensors")) by_name[t.at("name").get<std::string>()] = &t;
    for (auto& [name, t] : p.tensors()) {
      auto it = by_name.find(name);
      if (it == by_name.end())
        throw Error(ErrorCode::kMalformedHeader, path.string() + ": missing tensor " + name);
      const auto& jt = *it->second;
      auto shape = jt.at("shape").get<std::vector<Index>>();
      auto data = jt.at("data").get<std::vector<double>>();
      if (shape.size() != 2 || shape[0] != t->rows() || shape[1] != t->cols() ||
          data.size() != static_cast<std::size_t>(t->size()))
        throw Error(ErrorCode::kShapeMismatch, path.string() + ": bad shape for " + name);
      for (Index r = 0; r < t->rows(); ++r)
        for (Index c = 0; c < t->cols(); ++c)
          (*t)(r, c) = data[static_cast<std::size_t>(r * t->cols() + c)];
    }
    p.validate();
    return p;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kMalformedHeader, path.string() + ": " + e.what());
  }
}

}  // namespace strev
