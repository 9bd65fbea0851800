// src/spectral.cc

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

#include "strev/spectral.h"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>

#include <fftw3.h>

#include "strev/error.h"

namespace strev {

namespace {

struct FftwFree {
  void operator()(void* p) const { fftw_free(p); }
};

// Plans are created once per size under a lock; execution through the
// new-array interface is thread-safe.
class RealFft {
 public:
  explicit RealFft(int n) : n_(n) {
    std::lock_guard<std::mutex> lock(planner_mutex());
    auto* in = static_cast<double*>(fftw_malloc(sizeof(double) * n));
    auto* out = static_cast<fftw_complex*>(
        fftw_malloc(sizeof(fftw_complex) * (n / 2 + 1)));
    plan_ = fftw_plan_dft_r2c_1d(n, in, out, FFTW_ESTIMATE);
    fftw_free(in);
    fftw_free(out);
  }
  RealFft(const RealFft&) = delete;
  RealFft& operator=(const RealFft&) = delete;
  ~RealFft() {
    std::lock_guard<std::mutex> lock(planner_mutex());
    fftw_destroy_plan(plan_);
  }

  // in must hold n doubles and out n/2+1 complex values, both fftw_malloc'd.
  void execute(double* in, fftw_complex* out) const {
    fftw_execute_dft_r2c(plan_, in, out);
  }

  static const RealFft& get(int n) {
    static std::mutex cache_mutex;
    static std::map<int, std::unique_ptr<RealFft>> cache;
    std::lock_guard<std::mutex> lock(cache_mutex);
    auto& slot = cache[n];
    if (!slot) slot = std::make_unique<RealFft>(n);
    return *slot;
  }

 private:
  static std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
  }

  int n_;
  fftw_plan plan_;
};

// Mirror index into [0, n) without repeating the edge sample.
std::size_t reflect_index(long i, long n) {
  if (n == 1) return 0;
  long period = 2 * (n - 1);
  long m = i % period;
  if (m < 0) m += period;
  return static_cast<std::size_t>(m < n ? m : period - m);
}

}  // namespace

void StftConfig::validate() const {
  if (hop <= 0 || win_length <= 0 || n_fft <= 0 || hop > win_length ||
      win_length > n_fft)
    throw Error(ErrorCode::kInvalidArgument,
                "stft config requires 0 < hop <= win_length <= n_fft");
}

Vector hann_window(int length) {
  Vector w(length);
  if (length == 1) {
    w(0) = 1.0;
    return w;
  }
  for (int i = 0; i < length; ++i)
    w(i) = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * i / (length - 1));
  return w;
}

int num_stft_frames(std::size_t num_samples, const StftConfig& cfg) {
  long n = static_cast<long>(num_samples);
  if (cfg.center) return static_cast<int>(1 + n / cfg.hop);
  if (n < cfg.n_fft) return 0;
  return static_cast<int>(1 + (n - cfg.n_fft) / cfg.hop);
}

Spectrogram stft(const Waveform& w, const StftConfig& cfg) {
  cfg.validate();
  if (w.samples.empty())
    throw Error(ErrorCode::kInvalidArgument, "stft of an empty waveform");
  const int frames = num_stft_frames(w.samples.size(), cfg);
  if (frames <= 0)
    throw Error(ErrorCode::kInvalidArgument,
                "waveform shorter than one uncentred frame");

  // Window of win_length centred inside n_fft.
  Vector window = Vector::Zero(cfg.n_fft);
  window.segment((cfg.n_fft - cfg.win_length) / 2, cfg.win_length) =
      hann_window(cfg.win_length);

  const long n = static_cast<long>(w.samples.size());
  const long offset = cfg.center ? cfg.n_fft / 2 : 0;
  const int bins = cfg.num_bins();
  const RealFft& fft = RealFft::get(cfg.n_fft);
  std::unique_ptr<double, FftwFree> in(
      static_cast<double*>(fftw_malloc(sizeof(double) * cfg.n_fft)));
  std::unique_ptr<fftw_complex, FftwFree> out(
      static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * bins)));

  Spectrogram spec;
  spec.config = cfg;
  spec.sample_rate = w.sample_rate;
  spec.magnitudes.resize(frames, bins);
  for (int f = 0; f < frames; ++f) {
    long start = static_cast<long>(f) * cfg.hop - offset;
    for (int i = 0; i < cfg.n_fft; ++i) {
      long idx = start + i;
      double x = (idx >= 0 && idx < n) ? w.samples[idx]
                                       : w.samples[reflect_index(idx, n)];
      in.get()[i] = x * window(i);
    }
    fft.execute(in.get(), out.get());
    for (int b = 0; b < bins; ++b)
      spec.magnitudes(f, b) = std::hypot(out.get()[b][0], out.get()[b][1]);
  }
  return spec;
}

double hz_to_mel(double hz) { return 2595.0 * std::log10(1.0 + hz / 700.0); }

double mel_to_hz(double mel) {
  return 700.0 * (std::pow(10.0, mel / 2595.0) - 1.0);
}

Vector mel_center_frequencies(int n_mels, double fmin, double fmax) {
  const double lo = hz_to_mel(fmin);
  const double hi = hz_to_mel(fmax);
  Vector centers(n_mels);
  for (int m = 0; m < n_mels; ++m)
    centers(m) = mel_to_hz(lo + (hi - lo) * (m + 1) / (n_mels + 1));
  return centers;
}

Matrix mel_filterbank(int sample_rate, int n_fft, int n_mels, double fmin,
                      double fmax) {
  if (sample_rate <= 0 || n_fft <= 0 || n_mels <= 0)
    throw Error(ErrorCode::kInvalidArgument,
                "mel filterbank needs positive rate, n_fft and n_mels");
  if (!(fmin >= 0.0 && fmin < fmax && fmax <= sample_rate / 2.0))
    throw Error(ErrorCode::kInvalidArgument,
                "mel filterbank needs 0 <= fmin < fmax <= sample_rate / 2");

  const int bins = n_fft / 2 + 1;
  const double lo = hz_to_mel(fmin);
  const double hi = hz_to_mel(fmax);
  std::vector<double> edges(n_mels + 2);
  for (int i = 0; i < n_mels + 2; ++i)
    edges[i] = mel_to_hz(lo + (hi - lo) * i / (n_mels + 1));

  Matrix fb = Matrix::Zero(n_mels, bins);
  for (int m = 0; m < n_mels; ++m) {
    const double left = edges[m], center = edges[m + 1], right = edges[m + 2];
    bool any = false;
    for (int b = 0; b < bins; ++b) {
      double f = static_cast<double>(b) * sample_rate / n_fft;
      double v = 0.0;
      if (f > left && f <= center)
        v = (f - left) / (center - left);
      else if (f > center && f < right)
        v = (right - f) / (right - center);
      if (v > 0.0) {
        fb(m, b) = v;
        any = true;
      }
    }
    if (!any)
      throw Error(ErrorCode::kInvalidArgument,
                  "mel filter " + std::to_string(m) +
                      " covers no FFT bin; increase n_fft or reduce n_mels");
  }
  return fb;
}

MelSpectrogram log_mel(const Spectrogram& spec, const Matrix& filterbank) {
  if (filterbank.cols() != spec.magnitudes.cols())
    throw Error(ErrorCode::kShapeMismatch,
                "filterbank has " + std::to_string(filterbank.cols()) +
                    " bins, spectrogram has " +
                    std::to_string(spec.magnitudes.cols()));
  MelSpectrogram mel;
  mel.sample_rate = spec.sample_rate;
  mel.values = (spec.magnitudes * filterbank.transpose())
                   .array()
                   .max(kMelFloor)
                   .log()
                   .matrix();
  return mel;
}

MelFrontend::MelFrontend(const StftConfig& cfg, int sample_rate, int n_mels)
    : cfg_(cfg),
      sample_rate_(sample_rate),
      filterbank_(mel_filterbank(sample_rate, cfg.n_fft, n_mels, 0.0,
                                 std::min(8000.0, sample_rate / 2.0))) {
  cfg_.validate();
}

MelSpectrogram MelFrontend::compute(const Waveform& w) const {
  if (w.sample_rate != sample_rate_)
    return log_mel(stft(resample(w, sample_rate_), cfg_), filterbank_);
  return log_mel(stft(w, cfg_), filterbank_);
}

void write_matrix_csv(const Matrix& m, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::kIo, "cannot write " + path.string());
  char buf[32];
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      std::snprintf(buf, sizeof buf, "%.17g", m(r, c));
      if (c) out << ',';
      out << buf;
    }
    out << '\n';
  }
  if (!out) throw Error(ErrorCode::kIo, "write failed for " + path.string());
}

}  // namespace strev
