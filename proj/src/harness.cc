// src/harness.cc

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

#include "strev/harness.h"

#include <atomic>
#include <cstdio>
#include <exception>
#include <fstream>
#include <map>
#include <mutex>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "strev/corpus.h"
#include "strev/error.h"
#include "strev/metrics.h"
#include "strev/pitch.h"

namespace strev {

using nlohmann::json;

namespace {

const char* pairing_name(PairingPolicy p) {
  return p == PairingPolicy::kSameUtterance ? "same_utterance" : "speaker_centroid";
}

PairingPolicy parse_pairing(const std::string& s) {
  if (s == "same_utterance") return PairingPolicy::kSameUtterance;
  if (s == "speaker_centroid") return PairingPolicy::kSpeakerCentroid;
  throw Error(ErrorCode::kConfig, "unknown pairing policy '" + s + "'");
}

json config_json(const RunConfig& cfg, bool for_hash) {
  json j;
  j["version"] = RunConfig::kSchemaVersion;
  if (cfg.corpus.path)
    j["corpus"] = {{"path", cfg.corpus.path->string()}};
  else
    j["corpus"] = {{"synthetic",
                    {{"speakers", cfg.corpus.speakers},
                     {"utterances", cfg.corpus.utterances}}}};
  j["stft"] = {{"n_fft", cfg.stft.n_fft},
               {"hop", cfg.stft.hop},
               {"win_length", cfg.stft.win_length},
               {"center", cfg.stft.center}};
  json strategies = json::array();
  for (const auto& s : cfg.strategies) strategies.push_back(s.label());
  j["strategies"] = strategies;
  json grid = json::array();
  for (const auto& [a, b] : cfg.grid) grid.push_back({a, b});
  j["grid"] = grid;
  if (cfg.embedder == EmbedderKind::kMelStats)
    j["embedder"] = {{"kind", "mel_stats"}};
  else
    j["embedder"] = {{"kind", "attention"}, {"checkpoint", cfg.checkpoint.string()}};
  j["fusion_mode"] =
      cfg.fusion_mode == FusionMode::kWeighted ? "weighted" : "cross_attention";
  j["pairing"] = {{"sweep", pairing_name(cfg.sweep_pairing)},
                  {"ablation", pairing_name(cfg.ablation_pairing)}};
  j["seed"] = cfg.seed;
  if (!for_hash) {
    j["threads"] = cfg.threads;
    j["output_dir"] = cfg.output_dir.string();
  }
  return j;
}

std::string fnv1a_hex(const std::string& text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

// Reference embedding for utterance i: its speaker's forward centroid over
// the other utterances, or its own embedding if it is the speaker's only one.
std::vector<SpeakerEmbedding> references(const Corpus& corpus,
                                         const std::vector<SpeakerEmbedding>& forward,
                                         PairingPolicy pairing) {
  if (pairing == PairingPolicy::kSameUtterance) return forward;
  std::vector<SpeakerEmbedding> out(forward.size());
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    Vector sum = Vector::Zero(forward[i].values.size());
    std::size_t count = 0;
    for (std::size_t j = 0; j < corpus.size(); ++j) {
      if (j == i || corpus[j].speaker != corpus[i].speaker) continue;
      sum += forward[j].values;
      ++count;
    }
    out[i].source_id = corpus[i].speaker;
    out[i].values = count ? Vector(sum / static_cast<double>(count)) : forward[i].values;
  }
  return out;
}

Pairing identity_pairing(std::size_t n) {
  Pairing p;
  for (std::size_t i = 0; i < n; ++i) p.emplace_back(i, i);
  return p;
}

template <typename F>
auto with_context(const LabelledWaveform& u, F&& fn) {
  try {
    return fn();
  } catch (const Error& e) {
    throw Error(e.code(), u.wave.id + ": " + e.what());
  }
}

}  // namespace

std::vector<std::pair<double, double>> RunConfig::default_fusion_grid() {
  return {{0.0, 1.0}, {0.25, 0.75}, {0.5, 0.5}, {0.75, 0.25}, {1.0, 0.0}};
}

void RunConfig::validate() const {
  if (strategies.empty()) throw Error(ErrorCode::kConfig, "strategy list is empty");
  if (grid.empty()) throw Error(ErrorCode::kConfig, "fusion grid is empty");
  for (const auto& [a, b] : grid)
    if (!(a >= 0.0 && a <= 1.0 && b >= 0.0 && b <= 1.0))
      throw Error(ErrorCode::kConfig, "fusion grid entries must lie in [0, 1]^2");
  if (!corpus.path && (corpus.speakers < 2 || corpus.utterances < 1))
    throw Error(ErrorCode::kConfig,
                "synthetic corpus needs >= 2 speakers and >= 1 utterance each");
  if (embedder == EmbedderKind::kAttention && checkpoint.empty())
    throw Error(ErrorCode::kConfig, "attention embedder requires a checkpoint");
  if (threads < 1) throw Error(ErrorCode::kConfig, "threads must be >= 1");
  try {
    stft.validate();
  } catch (const Error& e) {
    throw Error(ErrorCode::kConfig, e.what());
  }
}

std::string RunConfig::hash() const { return fnv1a_hex(config_json(*this, true).dump()); }

std::string run_config_to_json(const RunConfig& cfg) {
  return config_json(cfg, false).dump(2);
}

RunConfig run_config_from_json(const std::string& text) {
  RunConfig cfg;
  try {
    json j = json::parse(text);
    if (!j.contains("version") || j["version"].get<int>() != RunConfig::kSchemaVersion)
      throw Error(ErrorCode::kConfig, "config version must be " +
                                          std::to_string(RunConfig::kSchemaVersion));
    if (j.contains("corpus")) {
      const json& c = j["corpus"];
      if (c.contains("path")) {
        cfg.corpus.path = c["path"].get<std::string>();
      } else if (c.contains("synthetic")) {
        cfg.corpus.speakers = c["synthetic"].value("speakers", cfg.corpus.speakers);
        cfg.corpus.utterances = c["synthetic"].value("utterances", cfg.corpus.utterances);
      }
    }
    if (j.contains("stft")) {
      const json& s = j["stft"];
      cfg.stft.n_fft = s.value("n_fft", cfg.stft.n_fft);
      cfg.stft.hop = s.value("hop", cfg.stft.hop);
      cfg.stft.win_length = s.value("win_length", cfg.stft.win_length);
      cfg.stft.center = s.value("center", cfg.stft.center);
    }
    if (j.contains("strategies")) {
      cfg.strategies.clear();
      for (const auto& s : j["strategies"]) {
        if (s.is_number())
          cfg.strategies.push_back(ReversalSpec::windowed(s.get<double>()));
        else
          cfg.strategies.push_back(ReversalSpec::parse(s.get<std::string>()));
      }
    }
    if (j.contains("grid")) {
      cfg.grid.clear();
      for (const auto& p : j["grid"]) {
        if (!p.is_array() || p.size() != 2)
          throw Error(ErrorCode::kConfig, "grid entries must be [alpha, beta]");
        cfg.grid.emplace_back(p[0].get<double>(), p[1].get<double>());
      }
    }
    if (j.contains("embedder")) {
      std::string kind = j["embedder"].value("kind", "mel_stats");
      if (kind == "mel_stats") {
        cfg.embedder = EmbedderKind::kMelStats;
      } else if (kind == "attention") {
        cfg.embedder = EmbedderKind::kAttention;
        cfg.checkpoint = j["embedder"].value("checkpoint", "");
      } else {
        throw Error(ErrorCode::kConfig, "unknown embedder '" + kind + "'");
      }
    }
    if (j.contains("fusion_mode")) {
      std::string mode = j["fusion_mode"].get<std::string>();
      if (mode == "weighted")
        cfg.fusion_mode = FusionMode::kWeighted;
      else if (mode == "cross_attention")
        cfg.fusion_mode = FusionMode::kCrossAttention;
      else
        throw Error(ErrorCode::kConfig, "unknown fusion mode '" + mode + "'");
    }
    if (j.contains("pairing")) {
      if (j["pairing"].contains("sweep"))
        cfg.sweep_pairing = parse_pairing(j["pairing"]["sweep"].get<std::string>());
      if (j["pairing"].contains("ablation"))
        cfg.ablation_pairing = parse_pairing(j["pairing"]["ablation"].get<std::string>());
    }
    cfg.seed = j.value("seed", cfg.seed);
    cfg.threads = j.value("threads", cfg.threads);
    if (j.contains("output_dir")) cfg.output_dir = j["output_dir"].get<std::string>();
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kConfig, std::string("bad config: ") + e.what());
  } catch (const Error& e) {
    throw Error(ErrorCode::kConfig, e.what());
  }
  cfg.validate();
  return cfg;
}

RunConfig load_run_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kMissingFile, "cannot open config " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return run_config_from_json(ss.str());
}

Embedder Embedder::mel_stats(const StftConfig& stft) {
  return Embedder(MelFrontend(stft), std::nullopt);
}

Embedder Embedder::attention(EncoderParams params, const StftConfig& stft) {
  params.validate();
  return Embedder(MelFrontend(stft), std::move(params));
}

Embedder Embedder::from_config(const RunConfig& cfg) {
  if (cfg.embedder == EmbedderKind::kAttention)
    return attention(load_checkpoint(cfg.checkpoint), cfg.stft);
  return mel_stats(cfg.stft);
}

SpeakerEmbedding Embedder::embed(const Waveform& w,
                                 const std::optional<ReversalSpec>& spec) const {
  if (params_) return utterance_embed(w, *params_, frontend_, spec);
  return utterance_embed_stats(w, frontend_, spec);
}

std::string Embedder::name() const { return params_ ? "attention" : "mel_stats"; }

Corpus load_corpus(const RunConfig& cfg) {
  if (cfg.corpus.path) return load_corpus_dir(*cfg.corpus.path);
  return synth_corpus(cfg.corpus.speakers, cfg.corpus.utterances, cfg.seed);
}

void parallel_for(std::size_t n, int threads, const std::function<void(std::size_t)>& fn) {
  if (threads <= 1 || n <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    for (std::size_t i = next++; i < n; i = next++) {
      try {
        fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  const std::size_t count = std::min<std::size_t>(static_cast<std::size_t>(threads), n);
  for (std::size_t t = 0; t < count; ++t) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

EvaluationReport run_reversal_sweep(const RunConfig& cfg) {
  cfg.validate();
  return run_reversal_sweep(cfg, load_corpus(cfg), Embedder::from_config(cfg));
}

EvaluationReport run_reversal_sweep(const RunConfig& cfg, const Corpus& corpus,
                                    const Embedder& embedder) {
  cfg.validate();
  if (corpus.empty()) throw Error(ErrorCode::kInvalidArgument, "empty corpus");
  const std::size_t n = corpus.size();
  const std::size_t k = cfg.strategies.size();

  std::vector<SpeakerEmbedding> forward(n);
  std::vector<PitchContour> pitch(n);
  // Row-major n x k.
  std::vector<SpeakerEmbedding> reversed(n * k);
  std::vector<std::optional<double>> pitch_corr(n * k);

  parallel_for(n, cfg.threads, [&](std::size_t i) {
    const LabelledWaveform& u = corpus[i];
    with_context(u, [&] {
      forward[i] = embedder.embed(u.wave);
      pitch[i] = estimate_f0(u.wave);
      for (std::size_t s = 0; s < k; ++s) {
        const ReversalSpec& spec = cfg.strategies[s];
        Waveform rev = apply_reversal(u.wave, spec);
        reversed[i * k + s] = embedder.embed(u.wave, spec);
        PitchContour p = estimate_f0(rev);
        if (spec.is_full()) p = reverse_frames(p);
        try {
          pitch_corr[i * k + s] = contour_correlation(pitch[i], p);
        } catch (const Error& e) {
          if (e.code() != ErrorCode::kDegenerate) throw;
        }
      }
      return 0;
    });
  });

  std::vector<SpeakerEmbedding> refs = references(corpus, forward, cfg.sweep_pairing);
  EvaluationReport report;
  report.meta.kind = "sweep";
  report.meta.config_hash = cfg.hash();
  report.meta.seed = cfg.seed;
  report.meta.embedder = embedder.name();
  report.meta.created_at = current_timestamp();
  for (std::size_t s = 0; s < k; ++s) {
    std::vector<SpeakerEmbedding> generated(n);
    double corr_sum = 0.0;
    std::size_t corr_count = 0;
    for (std::size_t i = 0; i < n; ++i) {
      generated[i] = reversed[i * k + s];
      if (pitch_corr[i * k + s]) {
        corr_sum += *pitch_corr[i * k + s];
        ++corr_count;
      }
    }
    StrategyScore score;
    score.strategy = cfg.strategies[s].label();
    score.ss = speaker_similarity_score(generated, refs, identity_pairing(n));
    if (corr_count) score.pitch_correlation = corr_sum / static_cast<double>(corr_count);
    score.utterances = n;
    report.strategies.push_back(std::move(score));
  }
  return report;
}

EvaluationReport run_fusion_ablation(const RunConfig& cfg) {
  cfg.validate();
  return run_fusion_ablation(cfg, load_corpus(cfg), Embedder::from_config(cfg));
}

EvaluationReport run_fusion_ablation(const RunConfig& cfg, const Corpus& corpus,
                                     const Embedder& embedder) {
  cfg.validate();
  if (corpus.empty()) throw Error(ErrorCode::kInvalidArgument, "empty corpus");
  const std::size_t n = corpus.size();
  std::vector<SpeakerEmbedding> forward(n), reversed(n);
  parallel_for(n, cfg.threads, [&](std::size_t i) {
    with_context(corpus[i], [&] {
      forward[i] = embedder.embed(corpus[i].wave);
      reversed[i] = embedder.embed(corpus[i].wave, ReversalSpec::full());
      return 0;
    });
  });

  std::optional<CrossAttentionParams> cross;
  if (cfg.fusion_mode == FusionMode::kCrossAttention)
    cross = CrossAttentionParams::initialize(cfg.seed);

  std::vector<SpeakerEmbedding> refs = references(corpus, forward, cfg.ablation_pairing);
  const Pairing pairs = identity_pairing(n);

  EvaluationReport report;
  report.meta.kind = "ablation";
  report.meta.config_hash = cfg.hash();
  report.meta.seed = cfg.seed;
  report.meta.embedder = embedder.name();
  report.meta.created_at = current_timestamp();
  report.baseline_ss = speaker_similarity_score(forward, refs, pairs);

  std::vector<std::vector<FusionPoint>> per_utt(n);
  for (std::size_t i = 0; i < n; ++i)
    per_utt[i] = sweep_weights(forward[i], reversed[i], cfg.grid, cross);
  for (std::size_t g = 0; g < cfg.grid.size(); ++g) {
    std::vector<SpeakerEmbedding> fused(n);
    for (std::size_t i = 0; i < n; ++i) fused[i] = per_utt[i][g].fused;
    report.fusion.push_back(
        {cfg.grid[g].first, cfg.grid[g].second, speaker_similarity_score(fused, refs, pairs)});
  }
  return report;
}

}  // namespace strev
