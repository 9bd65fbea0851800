// src/audio_io.cc

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

#include "strev/audio_io.h"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iterator>
#include <numbers>
#include <numeric>

#include "strev/error.h"

namespace strev {

namespace {

constexpr std::uint16_t kFormatPcm = 1;
constexpr std::uint16_t kFormatFloat = 3;
constexpr std::uint16_t kFormatExtensible = 0xFFFE;

std::uint32_t read_u32(const unsigned char* p) {
  return static_cast<std::uint32_t>(p[0]) |
         (static_cast<std::uint32_t>(p[1]) << 8) |
         (static_cast<std::uint32_t>(p[2]) << 16) |
         (static_cast<std::uint32_t>(p[3]) << 24);
}

std::uint16_t read_u16(const unsigned char* p) {
  return static_cast<std::uint16_t>(p[0] | (p[1] << 8));
}

void put_u32(std::vector<unsigned char>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back((v >> (8 * i)) & 0xFF);
}

void put_u16(std::vector<unsigned char>& out, std::uint16_t v) {
  out.push_back(v & 0xFF);
  out.push_back((v >> 8) & 0xFF);
}

void put_tag(std::vector<unsigned char>& out, const char* tag) {
  out.insert(out.end(), tag, tag + 4);
}

[[noreturn]] void malformed(const std::filesystem::path& path,
                            const std::string& what) {
  throw Error(ErrorCode::kMalformedHeader, path.string() + ": " + what);
}

double kaiser(double x, double beta) {
  // x in [-1, 1]
  double arg = 1.0 - x * x;
  if (arg < 0.0) return 0.0;
  return std::cyl_bessel_i(0.0, beta * std::sqrt(arg)) /
         std::cyl_bessel_i(0.0, beta);
}

double sinc(double x) {
  if (x == 0.0) return 1.0;
  double px = std::numbers::pi * x;
  return std::sin(px) / px;
}

}  // namespace

void validate(const Waveform& w) {
  if (w.sample_rate <= 0)
    throw Error(ErrorCode::kInvalidArgument,
                "waveform '" + w.id + "' has non-positive sample rate");
  if (w.samples.empty())
    throw Error(ErrorCode::kInvalidArgument,
                "waveform '" + w.id + "' is empty");
  for (double s : w.samples)
    if (!std::isfinite(s))
      throw Error(ErrorCode::kInvalidArgument,
                  "waveform '" + w.id + "' has non-finite samples");
}

double energy(const Waveform& w) {
  std::vector<double> squares(w.samples.size());
  for (std::size_t i = 0; i < squares.size(); ++i) squares[i] = w.samples[i] * w.samples[i];
  std::sort(squares.begin(), squares.end());
  double sum = 0.0;
  for (double s : squares) sum += s;
  return sum;
}

Waveform read_wav(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw Error(ErrorCode::kMissingFile, "cannot open " + path.string());
  std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)),
                                   std::istreambuf_iterator<char>());
  if (bytes.size() < 12 || std::memcmp(bytes.data(), "RIFF", 4) != 0 ||
      std::memcmp(bytes.data() + 8, "WAVE", 4) != 0)
    malformed(path, "not a RIFF/WAVE file");

  bool have_fmt = false;
  std::uint16_t format = 0, channels = 0, bits = 0;
  std::uint32_t rate = 0;
  const unsigned char* data = nullptr;
  std::size_t data_size = 0;

  std::size_t pos = 12;
  while (pos + 8 <= bytes.size()) {
    const unsigned char* chunk = bytes.data() + pos;
    std::uint32_t size = read_u32(chunk + 4);
    std::size_t body = pos + 8;
    if (body + size > bytes.size()) {
      // Tolerate a truncated data chunk (streamed writers leave bad sizes).
      if (std::memcmp(chunk, "data", 4) != 0) malformed(path, "chunk overrun");
      size = static_cast<std::uint32_t>(bytes.size() - body);
    }
    if (std::memcmp(chunk, "fmt ", 4) == 0) {
      if (size < 16) malformed(path, "fmt chunk too short");
      const unsigned char* f = bytes.data() + body;
      format = read_u16(f);
      channels = read_u16(f + 2);
      rate = read_u32(f + 4);
      bits = read_u16(f + 14);
      if (format == kFormatExtensible) {
        if (size < 26) malformed(path, "extensible fmt chunk too short");
        format = read_u16(f + 24);
      }
      have_fmt = true;
    } else if (std::memcmp(chunk, "data", 4) == 0) {
      data = bytes.data() + body;
      data_size = size;
    }
    pos = body + size + (size & 1u);
  }
  if (!have_fmt) malformed(path, "missing fmt chunk");
  if (data == nullptr) malformed(path, "missing data chunk");
  if (rate == 0) malformed(path, "zero sample rate");
  if (channels != 1 && channels != 2)
    throw Error(ErrorCode::kUnsupportedEncoding,
                path.string() + ": " + std::to_string(channels) + " channels");
  bool pcm16 = format == kFormatPcm && bits == 16;
  bool float32 = format == kFormatFloat && bits == 32;
  if (!pcm16 && !float32)
    throw Error(ErrorCode::kUnsupportedEncoding,
                path.string() + ": format " + std::to_string(format) + " with " +
                    std::to_string(bits) + " bits");

  std::size_t bytes_per_sample = bits / 8;
  std::size_t frame_bytes = bytes_per_sample * channels;
  std::size_t frames = data_size / frame_bytes;

  Waveform w;
  w.sample_rate = static_cast<int>(rate);
  w.id = path.stem().string();
  w.samples.resize(frames);
  for (std::size_t i = 0; i < frames; ++i) {
    double acc = 0.0;
    for (std::size_t c = 0; c < channels; ++c) {
      const unsigned char* p = data + i * frame_bytes + c * bytes_per_sample;
      if (pcm16) {
        acc += static_cast<std::int16_t>(read_u16(p)) / 32768.0;
      } else {
        std::uint32_t raw = read_u32(p);
        float f;
        std::memcpy(&f, &raw, sizeof f);
        acc += f;
      }
    }
    w.samples[i] = acc / channels;
  }
  return w;
}

void write_wav(const Waveform& w, const std::filesystem::path& path) {
  validate(w);
  std::vector<unsigned char> out;
  std::uint32_t data_bytes = static_cast<std::uint32_t>(w.samples.size() * 2);
  out.reserve(44 + data_bytes);
  put_tag(out, "RIFF");
  put_u32(out, 36 + data_bytes);
  put_tag(out, "WAVE");
  put_tag(out, "fmt ");
  put_u32(out, 16);
  put_u16(out, kFormatPcm);
  put_u16(out, 1);
  put_u32(out, static_cast<std::uint32_t>(w.sample_rate));
  put_u32(out, static_cast<std::uint32_t>(w.sample_rate) * 2);
  put_u16(out, 2);
  put_u16(out, 16);
  put_tag(out, "data");
  put_u32(out, data_bytes);
  for (double s : w.samples) {
    double clipped = std::clamp(s, -1.0, 1.0);
    long q = std::lround(clipped * 32768.0);
    q = std::clamp(q, -32768L, 32767L);
    put_u16(out, static_cast<std::uint16_t>(static_cast<std::int16_t>(q)));
  }

  std::ofstream file(path, std::ios::binary | std::ios::trunc);
  if (!file) throw Error(ErrorCode::kIo, "cannot write " + path.string());
  file.write(reinterpret_cast<const char*>(out.data()),
             static_cast<std::streamsize>(out.size()));
  if (!file) throw Error(ErrorCode::kIo, "write failed for " + path.string());
}

Waveform resample(const Waveform& w, int target_rate) {
  if (target_rate <= 0)
    throw Error(ErrorCode::kInvalidArgument, "target rate must be positive");
  validate(w);
  if (target_rate == w.sample_rate) return w;

  constexpr int kTaps = 64;
  constexpr int kHalf = kTaps / 2;
  constexpr double kBeta = 8.6;
  constexpr double kRolloff = 0.945;

  const long g = std::gcd(w.sample_rate, target_rate);
  const long up = target_rate / g;
  const long down = w.sample_rate / g;
  const double cutoff = kRolloff * std::min(1.0, static_cast<double>(up) / down);

  // table[phase][j] weights input sample (i - kHalf + 1 + j) for an output
  // located at i + phase/up.
  std::vector<double> table(static_cast<std::size_t>(up) * kTaps);
  for (long phase = 0; phase < up; ++phase) {
    double frac = static_cast<double>(phase) / up;
    for (int j = 0; j < kTaps; ++j) {
      double t = frac - (j - kHalf + 1);
      table[phase * kTaps + j] =
          cutoff * sinc(cutoff * t) * kaiser(t / kHalf, kBeta);
    }
  }

  const long n_in = static_cast<long>(w.samples.size());
  const long n_out = (n_in * up + down - 1) / down;
  Waveform out;
  out.sample_rate = target_rate;
  out.id = w.id;
  out.samples.resize(static_cast<std::size_t>(n_out));
  for (long n = 0; n < n_out; ++n) {
    long num = n * down;
    long i = num / up;
    long phase = num % up;
    const double* h = &table[phase * kTaps];
    double acc = 0.0;
    for (int j = 0; j < kTaps; ++j) {
      long k = i - kHalf + 1 + j;
      if (k >= 0 && k < n_in) acc += h[j] * w.samples[k];
    }
    out.samples[n] = acc;
  }
  return out;
}

}  // namespace strev
