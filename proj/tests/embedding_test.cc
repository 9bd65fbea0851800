// tests/embedding_test.cc

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

#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <numeric>

#include "strev/corpus.h"
#include "strev/embedding.h"
#include "strev/error.h"
#include "strev/metrics.h"
#include "test_util.h"

using namespace strev;

namespace {

MelSpectrogram random_mel(Eigen::Index frames, std::uint64_t seed) {
  Rng rng(seed);
  MelSpectrogram m;
  m.values.resize(frames, kNumMels);
  for (Eigen::Index i = 0; i < m.values.size(); ++i)
    m.values.data()[i] = rng.uniform(-11.0, 3.0);
  return m;
}

}  // namespace

TEST_CASE("stats embedding has the documented layout", "[embedding]") {
  MelSpectrogram m = random_mel(37, 1);
  Vector e = mel_stats_embed(m).values;
  REQUIRE(e.size() == kEmbeddingDim);

  // Plain column statistics, accumulated in frame order.
  for (int b = 0; b < kNumMels; ++b) {
    double mean = m.values.col(b).mean();
    double var = (m.values.col(b).array() - mean).square().mean();
    CHECK(e(kStatsMeanOffset + b) == Catch::Approx(mean).epsilon(1e-12));
    CHECK(e(kStatsStdOffset + b) == Catch::Approx(std::sqrt(var)).epsilon(1e-12));
  }
  // Min and max of each 5-band group mean track.
  for (int g = 0; g < kStatsQuantileGroups; ++g) {
    Vector track = m.values.middleCols(g * 5, 5).rowwise().mean();
    CHECK(e(kStatsQuantileOffset + g * 6) == Catch::Approx(track.minCoeff()).epsilon(1e-12));
    CHECK(e(kStatsQuantileOffset + g * 6 + 5) == Catch::Approx(track.maxCoeff()).epsilon(1e-12));
    for (int q = 1; q < 6; ++q)
      CHECK(e(kStatsQuantileOffset + g * 6 + q) >= e(kStatsQuantileOffset + g * 6 + q - 1));
  }
}

TEST_CASE("two-frame hand case", "[embedding]") {
  MelSpectrogram m;
  m.values.resize(2, kNumMels);
  m.values.row(0).setZero();
  m.values.row(1).setConstant(2.0);
  Vector e = mel_stats_embed(m).values;
  for (int b = 0; b < kNumMels; ++b) {
    CHECK(e(kStatsMeanOffset + b) == 1.0);
    CHECK(e(kStatsStdOffset + b) == 1.0);
  }
  // Quantiles interpolate linearly between 0 and 2.
  for (int q = 0; q < 6; ++q)
    CHECK(e(kStatsQuantileOffset + q) == Catch::Approx(0.4 * q).margin(1e-15));
}

TEST_CASE("constant mel frames give zero spread", "[embedding]") {
  MelSpectrogram m;
  m.values = Matrix::Constant(9, kNumMels, -3.5);
  Vector e = mel_stats_embed(m).values;
  CHECK((e.segment(kStatsMeanOffset, kNumMels).array() == -3.5).all());
  CHECK((e.segment(kStatsStdOffset, kNumMels).array() == 0.0).all());
  CHECK((e.segment(kStatsQuantileOffset, 96).array() == -3.5).all());
}

TEST_CASE("frame permutations leave the embedding bit-identical", "[embedding][property]") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    MelSpectrogram m = random_mel(5 + static_cast<Eigen::Index>(seed) * 3, seed);
    std::vector<Eigen::Index> order(static_cast<std::size_t>(m.num_frames()));
    std::iota(order.begin(), order.end(), 0);
    Rng rng(seed + 100);
    for (std::size_t i = order.size(); i > 1; --i)
      std::swap(order[i - 1], order[static_cast<std::size_t>(rng.uniform() * i)]);
    MelSpectrogram shuffled = m;
    for (std::size_t i = 0; i < order.size(); ++i)
      shuffled.values.row(static_cast<Eigen::Index>(i)) = m.values.row(order[i]);
    CHECK(mel_stats_embed(shuffled).values == mel_stats_embed(m).values);
  }
}

TEST_CASE("bad mel input is rejected", "[embedding]") {
  MelSpectrogram empty;
  empty.values.resize(0, kNumMels);
  CHECK_THROWS_AS(mel_stats_embed(empty), Error);
  MelSpectrogram narrow;
  narrow.values = Matrix::Zero(4, 40);
  try {
    mel_stats_embed(narrow);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kShapeMismatch);
  }
}

TEST_CASE("utterance embeddings carry provenance", "[embedding]") {
  MelFrontend frontend;
  Waveform w = strev::testing::glide(120.0, 200.0, 16000);
  w.id = "utt";
  SpeakerEmbedding fwd = utterance_embed_stats(w, frontend);
  CHECK(fwd.source_id == "utt");
  CHECK_FALSE(fwd.reversed);
  SpeakerEmbedding rev = utterance_embed_stats(w, frontend, ReversalSpec::windowed(20));
  CHECK(rev.reversed);
  CHECK(rev.source_id == "utt");
  CHECK(utterance_embed_stats(w, frontend).values == fwd.values);
}

TEST_CASE("full reversal preserves the stats embedding direction", "[embedding][property]") {
  MelFrontend frontend;
  for (std::uint64_t seed = 0; seed < 4; ++seed) {
    Rng rng(seed);
    Waveform w = strev::testing::glide(rng.uniform(80, 250), rng.uniform(80, 250), 16000);
    SpeakerEmbedding fwd = utterance_embed_stats(w, frontend);
    SpeakerEmbedding rev = utterance_embed_stats(w, frontend, ReversalSpec::full());
    CHECK(cosine_similarity(fwd, rev) == Catch::Approx(1.0).margin(1e-9));
  }
}

TEST_CASE("amplitude scaling barely moves the embedding", "[embedding][property]") {
  MelFrontend frontend;
  Corpus corpus = synth_corpus(2, 2, 5);
  for (const auto& item : corpus) {
    Waveform half = item.wave;
    for (double& x : half.samples) x *= 0.5;
    CHECK(cosine_similarity(utterance_embed_stats(item.wave, frontend),
                            utterance_embed_stats(half, frontend)) >= 0.99);
  }
}

TEST_CASE("same-speaker utterances are closer than cross-speaker ones", "[embedding]") {
  MelFrontend frontend;
  Corpus corpus = synth_corpus(4, 3, 11);
  std::vector<SpeakerEmbedding> emb;
  for (const auto& item : corpus) emb.push_back(utterance_embed_stats(item.wave, frontend));
  double same = 0, cross = 0;
  int n_same = 0, n_cross = 0;
  for (std::size_t i = 0; i < emb.size(); ++i)
    for (std::size_t j = i + 1; j < emb.size(); ++j) {
      double c = cosine_similarity(emb[i], emb[j]);
      if (corpus[i].speaker == corpus[j].speaker) {
        same += c;
        ++n_same;
      } else {
        cross += c;
        ++n_cross;
      }
    }
  CHECK(same / n_same > cross / n_cross);
}
