// src/corpus.cc

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

#include "strev/corpus.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>

#include "strev/error.h"
#include "strev/random.h"

namespace strev {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kMaxHarmonicHz = 7600.0;
constexpr int kAmplitudeBlock = 32;

double resonance(double f, double center, double bandwidth) {
  double c2 = center * center;
  return c2 / std::sqrt((c2 - f * f) * (c2 - f * f) + (bandwidth * f) * (bandwidth * f));
}

std::string label(const char* prefix, std::size_t i) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%s%02zu", prefix, i);
  return buf;
}

constexpr int kSilenceHops = 12;

Waveform synth_utterance(const SyntheticVoice& voice, std::uint64_t utt_seed) {
  Rng rng(utt_seed);
  const int rate = kModelSampleRate;
  const int hop = rate / 50;  // 20 ms
  const double seconds = 0.02 * std::round(rng.uniform(0.8, 1.6) / 0.02);
  const auto n = static_cast<std::size_t>(std::lround(seconds * rate / hop)) * hop;
  const double glide = rng.uniform(-0.25, 0.25);
  const double vibrato_hz = rng.uniform(4.0, 6.0);
  const double syllable_hz = rng.uniform(3.0, 5.0);
  const double syllable_phase = rng.uniform(0.0, kTwoPi);
  double start[3], end[3];
  for (int i = 0; i < 3; ++i) {
    start[i] = voice.formants[i] * rng.uniform(0.88, 1.12);
    end[i] = voice.formants[i] * rng.uniform(0.88, 1.12);
  }

  Waveform w;
  w.sample_rate = rate;
  w.samples.assign(n, 0.0);
  std::vector<double> amps;
  double phase = 0.0;
  const double fade = 0.01 * rate;
  for (std::size_t i = 0; i < n; ++i) {
    const double t = static_cast<double>(i) / rate;
    const double pos = static_cast<double>(i) / static_cast<double>(n);
    const double f0 = voice.base_f0 * (1.0 + glide * (pos - 0.5)) *
                      (1.0 + 0.015 * std::sin(kTwoPi * vibrato_hz * t));
    phase += kTwoPi * f0 / rate;
    if (phase > kTwoPi * 1e6) phase = std::fmod(phase, kTwoPi);
    const int harmonics = static_cast<int>(kMaxHarmonicHz / f0);
    if (i % kAmplitudeBlock == 0) {
      amps.assign(static_cast<std::size_t>(harmonics) + 1, 0.0);
      for (int k = 1; k <= harmonics; ++k) {
        double fk = k * f0;
        double gain = 1.0;
        for (int r = 0; r < 3; ++r)
          gain *= resonance(fk, start[r] + (end[r] - start[r]) * pos, voice.bandwidths[r]);
        amps[k] = gain * std::pow(static_cast<double>(k), -voice.tilt);
      }
    }
    double x = 0.0;
    for (int k = 1; k <= harmonics && k < static_cast<int>(amps.size()); ++k)
      x += amps[k] * std::sin(k * phase);
    double envelope = 0.35 + 0.65 * std::pow(std::sin(std::numbers::pi * syllable_hz * t +
                                                      syllable_phase), 2);
    double edge = std::min({1.0, (i + 1) / fade, (n - i) / fade});
    w.samples[i] = (x + voice.breathiness * rng.uniform(-1.0, 1.0) * 4.0) * envelope * edge;
  }
  double peak = 0.0;
  for (double s : w.samples) peak = std::max(peak, std::abs(s));
  if (peak > 0.0)
    for (double& s : w.samples) s *= 0.5 / peak;
  // Leading and trailing silence, as in read speech recordings.
  const std::size_t pad = static_cast<std::size_t>(kSilenceHops) * hop;
  w.samples.insert(w.samples.begin(), pad, 0.0);
  w.samples.insert(w.samples.end(), pad, 0.0);
  return w;
}

}  // namespace

SyntheticVoice synth_voice(std::size_t speaker, std::uint64_t seed) {
  Rng rng(mix_seed(seed, 1000 + speaker));
  SyntheticVoice v;
  // Place speakers on a log-spaced F0 ladder with jitter inside each rung.
  const double rung = (speaker % 6 + rng.uniform(0.15, 0.85)) / 6.0;
  v.base_f0 = 90.0 * std::pow(300.0 / 90.0, rung);
  v.formants[0] = rng.uniform(320.0, 850.0);
  v.formants[1] = rng.uniform(950.0, 2300.0);
  v.formants[2] = rng.uniform(2450.0, 3400.0);
  v.bandwidths[0] = rng.uniform(60.0, 120.0);
  v.bandwidths[1] = rng.uniform(90.0, 180.0);
  v.bandwidths[2] = rng.uniform(140.0, 260.0);
  v.tilt = rng.uniform(0.7, 1.4);
  v.breathiness = rng.uniform(0.002, 0.02);
  return v;
}

Corpus synth_corpus(int n_speakers, int utts_per_speaker, std::uint64_t seed) {
  if (n_speakers < 2)
    throw Error(ErrorCode::kInvalidArgument, "synthetic corpus needs at least two speakers");
  if (utts_per_speaker < 1)
    throw Error(ErrorCode::kInvalidArgument, "synthetic corpus needs at least one utterance");
  Corpus corpus;
  for (int s = 0; s < n_speakers; ++s) {
    SyntheticVoice voice = synth_voice(static_cast<std::size_t>(s), seed);
    std::string speaker = label("spk", static_cast<std::size_t>(s));
    for (int u = 0; u < utts_per_speaker; ++u) {
      Waveform w = synth_utterance(
          voice, mix_seed(mix_seed(seed, static_cast<std::uint64_t>(s)),
                          static_cast<std::uint64_t>(u)));
      w.id = speaker + "_" + label("utt", static_cast<std::size_t>(u));
      corpus.push_back({std::move(w), speaker});
    }
  }
  return corpus;
}

Corpus load_corpus_dir(const std::filesystem::path& dir) {
  if (!std::filesystem::is_directory(dir))
    throw Error(ErrorCode::kMissingFile, "corpus directory " + dir.string() + " not found");
  std::vector<std::filesystem::path> files;
  for (const auto& entry : std::filesystem::directory_iterator(dir))
    if (entry.is_regular_file() && entry.path().extension() == ".wav")
      files.push_back(entry.path());
  std::sort(files.begin(), files.end());
  if (files.empty())
    throw Error(ErrorCode::kInvalidArgument, "no .wav files in " + dir.string());
  Corpus corpus;
  for (const auto& f : files) {
    try {
      Waveform w = resample(read_wav(f), kModelSampleRate);
      std::string stem = f.stem().string();
      std::string speaker = stem.substr(0, stem.find('_'));
      w.id = stem;
      corpus.push_back({std::move(w), speaker});
    } catch (const Error& e) {
      throw Error(e.code(), f.string() + ": " + e.what());
    }
  }
  return corpus;
}

void write_corpus(const Corpus& corpus, const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw Error(ErrorCode::kIo, "cannot create " + dir.string());
  for (const auto& u : corpus) write_wav(u.wave, dir / (u.wave.id + ".wav"));
}

}  // namespace strev
