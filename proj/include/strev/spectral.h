// include/strev/spectral.h

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

#ifndef STREV_SPECTRAL_H_
#define STREV_SPECTRAL_H_

#include <filesystem>

#include <Eigen/Core>

#include "strev/audio_io.h"

namespace strev {

// Frames are rows throughout.
using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vector = Eigen::VectorXd;

constexpr int kNumMels = 80;
constexpr double kMelFloor = 1e-5;

struct StftConfig {
  int n_fft = 1280;
  int hop = 320;
  int win_length = 1280;
  // Reflect-pad n_fft/2 samples on both sides so frame k is centred on
  // sample k * hop.
  bool center = true;

  int num_bins() const { return n_fft / 2 + 1; }
  // Requires 0 < hop <= win_length <= n_fft.
  void validate() const;
  bool operator==(const StftConfig&) const = default;
};

struct Spectrogram {
  Matrix magnitudes;  // frames x num_bins
  StftConfig config;
  int sample_rate = kModelSampleRate;

  Eigen::Index num_frames() const { return magnitudes.rows(); }
};

struct MelSpectrogram {
  Matrix values;  // frames x n_mels, natural log
  int sample_rate = kModelSampleRate;

  Eigen::Index num_frames() const { return values.rows(); }
};

// Symmetric Hann: w[i] == w[len - 1 - i].
Vector hann_window(int length);

// Frame count is 1 + N / hop with centring, 1 + (N - n_fft) / hop without.
int num_stft_frames(std::size_t num_samples, const StftConfig& cfg);

Spectrogram stft(const Waveform& w, const StftConfig& cfg = {});

double hz_to_mel(double hz);
double mel_to_hz(double mel);

// HTK-scale triangular filters with unit peaks, n_mels x (n_fft/2 + 1).
Matrix mel_filterbank(int sample_rate, int n_fft, int n_mels = kNumMels,
                      double fmin = 0.0, double fmax = 8000.0);

// Centre frequency (Hz) of each filter.
Vector mel_center_frequencies(int n_mels, double fmin, double fmax);

// ln(max(filterbank * magnitude, kMelFloor)) per frame.
MelSpectrogram log_mel(const Spectrogram& spec, const Matrix& filterbank);

// Waveform to log-mel with a fixed configuration. Inputs not at the
// frontend rate are resampled first. Immutable after construction.
class MelFrontend {
 public:
  explicit MelFrontend(const StftConfig& cfg = {},
                       int sample_rate = kModelSampleRate,
                       int n_mels = kNumMels);

  MelSpectrogram compute(const Waveform& w) const;

  const StftConfig& config() const { return cfg_; }
  int sample_rate() const { return sample_rate_; }
  const Matrix& filterbank() const { return filterbank_; }

 private:
  StftConfig cfg_;
  int sample_rate_;
  Matrix filterbank_;
};

// One row per line, comma separated, full precision.
void write_matrix_csv(const Matrix& m, const std::filesystem::path& path);

}  // namespace strev

#endif  // STREV_SPECTRAL_H_
