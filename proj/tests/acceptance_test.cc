// tests/acceptance_test.cc

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

// Acceptance checks. Prints one PASS/FAIL line per criterion and exits
// non-zero if any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <numbers>
#include <numeric>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "strev/corpus.h"
#include "strev/encoder.h"
#include "strev/fusion.h"
#include "strev/harness.h"
#include "strev/metrics.h"
#include "strev/pitch.h"
#include "strev/reversal.h"
#include "strev/spectral.h"
#include "test_util.h"

using namespace strev;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string format(const char* fmt, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof(buf), fmt, args...);
  return buf;
}

// 1. Reversal involution and energy conservation.
Outcome reversal_involution() {
  auto t0 = std::chrono::steady_clock::now();
  Rng rng(101);
  int failures = 0, checks = 0;
  for (int i = 0; i < 100; ++i) {
    auto n = static_cast<std::size_t>(rng.uniform(1.0, 32000.0));
    Waveform w = strev::testing::noise(n, 1000 + static_cast<std::uint64_t>(i));
    for (const ReversalSpec& spec : default_strategies()) {
      Waveform once = apply_reversal(w, spec);
      Waveform twice = apply_reversal(once, spec);
      ++checks;
      if (twice.samples != w.samples || energy(once) != energy(w)) ++failures;
    }
  }
  double secs = seconds_since(t0);
  return {failures == 0 && secs < 5.0,
          format("%d/%d waveform x strategy cases bit-exact with exact energy, %.2f s (limit 5 s)",
                 checks - failures, checks, secs)};
}

// 2. Spectrogram flip on a 2 s synthetic vowel.
Outcome spectrogram_flip() {
  const int rate = kModelSampleRate;
  const std::size_t n = 2 * rate;
  const double f0 = 140.0;
  const double formants[3] = {700.0, 1200.0, 2600.0};
  Waveform w;
  w.samples.resize(n);
  for (int k = 1; k * f0 < 7000.0; ++k) {
    double fk = k * f0, gain = 0.0;
    for (double f : formants) gain += 1.0 / (1.0 + std::pow((fk - f) / 90.0, 2));
    gain = (gain + 0.02) / k;
    for (std::size_t i = 0; i < n; ++i)
      w.samples[i] += gain * std::sin(2.0 * std::numbers::pi * fk * i / rate + 0.3 * k);
  }
  Spectrogram fwd = stft(w);
  Spectrogram rev = stft(reverse_full(w));
  const Eigen::Index frames = fwd.num_frames(), edge = 2;
  Matrix a = rev.magnitudes.middleRows(edge, frames - 2 * edge);
  Matrix b = fwd.magnitudes.colwise().reverse().middleRows(edge, frames - 2 * edge);
  double rel = (a - b).cwiseAbs().sum() / b.cwiseAbs().sum();

  auto top3 = [](const Eigen::RowVectorXd& row) {
    std::vector<Eigen::Index> idx(static_cast<std::size_t>(row.size()));
    std::iota(idx.begin(), idx.end(), 0);
    std::partial_sort(idx.begin(), idx.begin() + 3, idx.end(),
                      [&](auto x, auto y) { return row(x) > row(y); });
    return std::set<Eigen::Index>(idx.begin(), idx.begin() + 3);
  };
  int same = 0;
  for (Eigen::Index f = 0; f < a.rows(); ++f)
    if (top3(a.row(f)) == top3(b.row(f))) ++same;
  double share = static_cast<double>(same) / static_cast<double>(a.rows());
  return {rel <= 1e-3 && share >= 0.95,
          format("interior rel mean-abs %.3g (limit 1e-3), top-3 harmonic bins kept in %.1f%% "
                 "of %ld frames (limit 95%%)",
                 rel, 100.0 * share, static_cast<long>(a.rows()))};
}

// 3. Reversal-strategy ordering with the statistics embedder.
Outcome strategy_ordering() {
  auto t0 = std::chrono::steady_clock::now();
  RunConfig cfg;
  EvaluationReport r = run_reversal_sweep(cfg);
  double secs = seconds_since(t0);
  double full = 0, w50 = 0, w100 = 0;
  for (const auto& s : r.strategies) {
    if (s.strategy == "full") full = s.ss;
    if (s.strategy == "50ms") w50 = s.ss;
    if (s.strategy == "100ms") w100 = s.ss;
  }
  bool ok = r.strategies.size() == 7 && std::abs(full - 1.0) <= 1e-6 && full >= w50 &&
            full >= w100 && secs < 30.0;
  return {ok, format("%zu speakers x %zu utts: SS(full) = %.9f, SS(50ms) = %.6f, SS(100ms) = "
                     "%.6f, %.2f s (limit 30 s)",
                     static_cast<std::size_t>(cfg.corpus.speakers),
                     static_cast<std::size_t>(cfg.corpus.utterances), full, w50, w100, secs)};
}

// 4. Weighted fusion identity, linearity and hand case.
Outcome fusion_exactness() {
  Rng rng(404);
  auto random_embedding = [&](bool reversed) {
    SpeakerEmbedding e;
    e.values.resize(kEmbeddingDim);
    for (Eigen::Index i = 0; i < kEmbeddingDim; ++i) e.values(i) = rng.gaussian();
    e.reversed = reversed;
    return e;
  };
  int failures = 0;
  for (int i = 0; i < 1000; ++i) {
    SpeakerEmbedding s = random_embedding(false), r = random_embedding(true);
    double a = rng.uniform(), b = rng.uniform();
    Vector one_zero = fuse_weighted(s, r, 1.0, 0.0).values;
    Vector zero_one = fuse_weighted(s, r, 0.0, 1.0).values;
    if (one_zero != s.values) ++failures;
    if (fuse_weighted(s, r, a, b).values != a * one_zero + b * zero_one) ++failures;
  }
  SpeakerEmbedding e0, e1;
  e0.values = Vector::Zero(kEmbeddingDim);
  e0.values(0) = 1.0;
  e1.values = Vector::Zero(kEmbeddingDim);
  e1.values(1) = 1.0;
  e1.reversed = true;
  Vector hand = fuse_weighted(e0, e1, 0.5, 0.5).values;
  Vector expected = Vector::Zero(kEmbeddingDim);
  expected(0) = expected(1) = 0.5;
  bool hand_ok = hand == expected;
  return {failures == 0 && hand_ok,
          format("1000 random pairs: %d identity/linearity mismatches, (0.5, 0.5) hand case %s",
                 failures, hand_ok ? "exact" : "wrong")};
}

// 5. Reconstruction loss.
Outcome reconstruction_loss() {
  Rng rng(505);
  auto random_matrix = [&](Eigen::Index r, Eigen::Index c) {
    Matrix m(r, c);
    for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = rng.gaussian();
    return m;
  };
  Matrix src = random_matrix(6, kNumMels), ftr = random_matrix(6, kNumMels);
  double perfect = reconstruction_l1(Matrix(src + ftr), SourceFilterPair(src, ftr));
  double hand = reconstruction_l1(Matrix::Identity(2, 2),
                                  SourceFilterPair(Matrix::Zero(2, 2), Matrix::Zero(2, 2)));
  double worst = 0.0;
  for (int i = 0; i < 100; ++i) {
    Matrix x = random_matrix(4, kNumMels), a = random_matrix(4, kNumMels),
           b = random_matrix(4, kNumMels);
    double k = rng.uniform(0.1, 10.0);
    double base = reconstruction_l1(x, SourceFilterPair(a, b));
    double scaled = reconstruction_l1(Matrix(k * x), SourceFilterPair(k * a, k * b));
    worst = std::max(worst, std::abs(scaled - k * base) / (k * base));
  }
  return {perfect == 0.0 && hand == 0.5 && worst <= 1e-12,
          format("perfect = %g, 2x2 hand case = %.17g, homogeneity worst rel err %.3g over 100 "
                 "scalings (limit 1e-12)",
                 perfect, hand, worst)};
}

// 6. Encoder gradients, output size and shuffle invariance.
Outcome encoder_numerics() {
  EncoderParams p = EncoderParams::initialize({kNumMels, 4, 2, kEmbeddingDim}, 606);
  Rng rng(606);
  std::vector<Matrix> mels;
  for (int i = 0; i < 4; ++i) {
    Matrix m(3, kNumMels);
    for (Eigen::Index j = 0; j < m.size(); ++j) m.data()[j] = rng.uniform(-3.0, 3.0);
    mels.push_back(m);
  }
  const std::vector<int> labels{0, 0, 1, 1};
  const double margin = 0.2, h = 1e-5;
  EncoderParams grad = encoder_loss_gradient(p, mels, labels, margin).second;
  auto tensors = p.tensors();
  auto grads = grad.tensors();
  double worst = 0.0;
  std::string worst_name;
  for (std::size_t t = 0; t < tensors.size(); ++t) {
    Eigen::MatrixXd& w = *tensors[t].second;
    Eigen::MatrixXd fd(w.rows(), w.cols());
    for (Eigen::Index i = 0; i < w.size(); ++i) {
      double saved = w.data()[i];
      w.data()[i] = saved + h;
      double up = encoder_loss(p, mels, labels, margin);
      w.data()[i] = saved - h;
      double down = encoder_loss(p, mels, labels, margin);
      w.data()[i] = saved;
      fd.data()[i] = (up - down) / (2 * h);
    }
    const Eigen::MatrixXd& ga = *grads[t].second;
    double scale = std::max(ga.norm(), fd.norm());
    double rel = scale > 0.0 ? (ga - fd).norm() / scale : 0.0;
    if (rel >= worst) {
      worst = rel;
      worst_name = tensors[t].first;
    }
  }

  bool dims_ok = true, shuffle_ok = true;
  EncoderParams big = EncoderParams::initialize({}, 607);
  for (Eigen::Index frames : {1, 5, 40}) {
    MelSpectrogram m;
    m.values.resize(frames, kNumMels);
    for (Eigen::Index j = 0; j < m.values.size(); ++j) m.values.data()[j] = rng.gaussian();
    Vector e = attention_encode(m, big).values;
    dims_ok = dims_ok && e.size() == kEmbeddingDim;
    MelSpectrogram shuffled = m;
    for (Eigen::Index i = frames - 1; i > 0; --i)
      shuffled.values.row(i).swap(
          shuffled.values.row(static_cast<Eigen::Index>(rng.uniform() * (i + 1))));
    shuffle_ok = shuffle_ok && attention_encode(shuffled, big).values == e;
  }
  return {worst <= 1e-4 && dims_ok && shuffle_ok,
          format("%zu tensors, worst FD rel err %.3g (%s, limit 1e-4); 256-D %s; shuffle %s",
                 tensors.size(), worst, worst_name.c_str(), dims_ok ? "yes" : "no",
                 shuffle_ok ? "bit-exact" : "differs")};
}

// 7. Encoder learning on held-out utterances.
Outcome encoder_learning() {
  auto t0 = std::chrono::steady_clock::now();
  MelFrontend frontend;
  const std::uint64_t seed = 7;
  Corpus all = synth_corpus(6, 6, seed);
  Corpus train, held_out;
  for (std::size_t i = 0; i < all.size(); ++i) (i % 6 < 4 ? train : held_out).push_back(all[i]);
  TrainResult r = train_encoder(train, EncoderParams::initialize({}, seed), {}, frontend);
  std::vector<SpeakerEmbedding> emb;
  for (const auto& u : held_out) emb.push_back(utterance_embed(u.wave, r.params, frontend));
  double same = 0, cross = 0;
  int ns = 0, nc = 0;
  for (std::size_t i = 0; i < emb.size(); ++i)
    for (std::size_t j = i + 1; j < emb.size(); ++j) {
      double c = cosine_similarity(emb[i], emb[j]);
      if (held_out[i].speaker == held_out[j].speaker) {
        same += c;
        ++ns;
      } else {
        cross += c;
        ++nc;
      }
    }
  double gap = same / ns - cross / nc;
  double secs = seconds_since(t0);
  return {gap >= 0.2 && secs < 120.0,
          format("6 speakers x 4 train utts, 200 steps: held-out same %.4f, cross %.4f, gap "
                 "%.4f (limit 0.2), %.1f s (limit 120 s)",
                 same / ns, cross / nc, gap, secs)};
}

// 8. Pitch tracking and reversed-glide contour.
Outcome pitch_tracking() {
  auto median_f0 = [](double hz) {
    PitchContour p = estimate_f0(strev::testing::sine(hz, 1.0));
    std::vector<double> v;
    for (std::size_t i = 0; i < p.num_frames(); ++i)
      if (p.voiced[i]) v.push_back(p.f0[i]);
    if (v.empty()) return 0.0;
    std::sort(v.begin(), v.end());
    return v[v.size() / 2];
  };
  double m220 = median_f0(220.0), m100 = median_f0(100.0);
  Waveform glide = strev::testing::glide(110.0, 280.0, 2 * kModelSampleRate);
  double corr = contour_correlation(estimate_f0(glide),
                                    reverse_frames(estimate_f0(reverse_full(glide))));
  return {std::abs(m220 - 220.0) <= 3.0 && std::abs(m100 - 100.0) <= 3.0 && corr >= 0.95,
          format("220 Hz -> %.2f, 100 Hz -> %.2f (limit +-3 Hz); reversed glide corr %.4f "
                 "(limit 0.95)",
                 m220, m100, corr)};
}

std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// 9. Harness determinism.
Outcome harness_determinism() {
  strev::testing::TempDir dir("acceptance");
  RunConfig cfg;
  cfg.corpus.speakers = 4;
  cfg.corpus.utterances = 3;
  std::vector<std::string> bodies;
  for (int threads : {1, 1, 4}) {
    cfg.threads = threads;
    auto out = dir.path() / std::to_string(bodies.size());
    emit_report(run_reversal_sweep(cfg), out);
    emit_report(run_fusion_ablation(cfg), out);
    bodies.push_back(read_file(out / "sweep.csv") + read_file(out / "ablation.csv"));
  }
  bool runs = bodies[0] == bodies[1];
  bool threads = bodies[0] == bodies[2];
  return {runs && threads && !bodies[0].empty(),
          format("sweep+ablation CSV bytes: repeat run %s, 1 vs 4 threads %s",
                 runs ? "identical" : "differ", threads ? "identical" : "differ")};
}

// 10. Fusion-weight ablation.
Outcome fusion_ablation() {
  RunConfig cfg;
  EvaluationReport r = run_fusion_ablation(cfg);
  bool has_half = false;
  std::optional<double> one_zero;
  for (const auto& f : r.fusion) {
    if (f.alpha == 0.5 && f.beta == 0.5) has_half = true;
    if (f.alpha == 1.0 && f.beta == 0.0) one_zero = f.ss;
  }
  bool grid_ok = r.fusion.size() == 5;
  for (std::size_t i = 0; grid_ok && i < 5; ++i)
    grid_ok = r.fusion[i].alpha == 0.25 * static_cast<double>(i) &&
              r.fusion[i].beta == 1.0 - 0.25 * static_cast<double>(i);
  bool baseline_ok = one_zero && r.baseline_ss && *one_zero == *r.baseline_ss;
  return {grid_ok && has_half && baseline_ok,
          format("%zu scores, (0.5, 0.5) %s, SS(1, 0) = %.17g vs baseline %.17g",
                 r.fusion.size(), has_half ? "present" : "missing", one_zero.value_or(-2.0),
                 r.baseline_ss.value_or(-2.0))};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"reversal involution and energy conservation", reversal_involution},
      {"spectrogram flip under full reversal", spectrogram_flip},
      {"strategy ordering with the statistics embedder", strategy_ordering},
      {"weighted fusion exactness", fusion_exactness},
      {"reconstruction loss exactness", reconstruction_loss},
      {"encoder numerics", encoder_numerics},
      {"encoder learning on held-out speakers", encoder_learning},
      {"pitch tracking and reversed contours", pitch_tracking},
      {"harness determinism", harness_determinism},
      {"fusion-weight ablation", fusion_ablation},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("threw: ") + e.what()};
    }
    if (!o.pass) ++failed;
    std::printf("%s  %2zu  %s: %s\n", o.pass ? "PASS" : "FAIL", i + 1,
                criteria[i].first.c_str(), o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%zu/%zu criteria passed\n", criteria.size() - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
