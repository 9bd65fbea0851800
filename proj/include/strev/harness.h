// include/strev/harness.h

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

#ifndef STREV_HARNESS_H_
#define STREV_HARNESS_H_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "strev/embedding.h"
#include "strev/encoder.h"
#include "strev/fusion.h"
#include "strev/reversal.h"
#include "strev/spectral.h"

namespace strev {

inline constexpr const char* kVersion = "0.1.0";

enum class EmbedderKind { kMelStats, kAttention };
enum class PairingPolicy { kSameUtterance, kSpeakerCentroid };

// Where utterances come from: a directory of wav files, or the synthetic
// generator when path is unset.
struct CorpusSource {
  std::optional<std::filesystem::path> path;
  int speakers = 6;
  int utterances = 4;
};

struct RunConfig {
  static constexpr int kSchemaVersion = 1;

  CorpusSource corpus;
  StftConfig stft;
  std::vector<ReversalSpec> strategies = default_strategies();
  std::vector<std::pair<double, double>> grid = default_fusion_grid();
  EmbedderKind embedder = EmbedderKind::kMelStats;
  std::filesystem::path checkpoint;  // kAttention only
  FusionMode fusion_mode = FusionMode::kWeighted;
  PairingPolicy sweep_pairing = PairingPolicy::kSameUtterance;
  PairingPolicy ablation_pairing = PairingPolicy::kSpeakerCentroid;
  std::uint64_t seed = 7;
  int threads = 1;
  std::filesystem::path output_dir = "strev_out";

  // alpha in {0, .25, .5, .75, 1}, beta = 1 - alpha.
  static std::vector<std::pair<double, double>> default_fusion_grid();

  // Throws kConfig on an empty strategy list, grid entries outside [0,1]^2,
  // bad counts or a missing checkpoint for the attention embedder.
  void validate() const;

  // Hash of every field that affects results; threads and output_dir are
  // excluded. 16 lowercase hex digits.
  std::string hash() const;
};

std::string run_config_to_json(const RunConfig& cfg);
// Missing keys keep their defaults; "version" must equal kSchemaVersion.
RunConfig run_config_from_json(const std::string& text);
RunConfig load_run_config(const std::filesystem::path& path);

// Waveform to embedding with either the mel-statistics or attention path.
class Embedder {
 public:
  static Embedder mel_stats(const StftConfig& stft = {});
  static Embedder attention(EncoderParams params, const StftConfig& stft = {});
  static Embedder from_config(const RunConfig& cfg);

  SpeakerEmbedding embed(const Waveform& w,
                         const std::optional<ReversalSpec>& spec = {}) const;
  std::string name() const;

 private:
  Embedder(MelFrontend frontend, std::optional<EncoderParams> params)
      : frontend_(std::move(frontend)), params_(std::move(params)) {}

  MelFrontend frontend_;
  std::optional<EncoderParams> params_;
};

struct StrategyScore {
  std::string strategy;
  double ss = 0.0;
  // Mean F0 contour correlation with the original, realigned for full
  // reversal; unset when no utterance has two jointly voiced frames.
  std::optional<double> pitch_correlation;
  std::size_t utterances = 0;
};

struct FusionScore {
  double alpha = 0.0;
  double beta = 0.0;
  double ss = 0.0;
};

struct ReportMetadata {
  std::string kind;  // "sweep" or "ablation"
  std::string config_hash;
  std::uint64_t seed = 0;
  std::string version = kVersion;
  std::string embedder;
  std::string created_at;  // the only non-deterministic field
};

struct EvaluationReport {
  ReportMetadata meta;
  std::vector<StrategyScore> strategies;
  std::vector<FusionScore> fusion;
  std::optional<double> baseline_ss;  // ablation: unfused forward score
};

Corpus load_corpus(const RunConfig& cfg);

// Calls fn(i) for i in [0, n) on up to `threads` workers. The first
// exception thrown is rethrown after all workers finish.
void parallel_for(std::size_t n, int threads, const std::function<void(std::size_t)>& fn);

// Reverses every utterance per strategy and scores it against its
// unreversed embedding (or the speaker's leave-one-out centroid).
EvaluationReport run_reversal_sweep(const RunConfig& cfg);
EvaluationReport run_reversal_sweep(const RunConfig& cfg, const Corpus& corpus,
                                    const Embedder& embedder);

// Fuses forward and fully reversed embeddings at each grid point and scores
// them against the speaker reference (leave-one-out centroid of forward
// embeddings, or the utterance's own forward embedding).
EvaluationReport run_fusion_ablation(const RunConfig& cfg);
EvaluationReport run_fusion_ablation(const RunConfig& cfg, const Corpus& corpus,
                                     const Embedder& embedder);

// Body of the CSV form (header + rows), without any timestamp.
std::string report_csv(const EvaluationReport& r);
std::string report_to_json(const EvaluationReport& r);
EvaluationReport report_from_json(const std::string& text);

// Writes <kind>.json and <kind>.csv into dir (created if needed).
void emit_report(const EvaluationReport& r, const std::filesystem::path& dir);
EvaluationReport read_report(const std::filesystem::path& json_path);

std::string embedding_to_json(const SpeakerEmbedding& e);

std::string current_timestamp();

}  // namespace strev

#endif  // STREV_HARNESS_H_
