// tools/strev.cc

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

#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "strev/audio_io.h"
#include "strev/corpus.h"
#include "strev/encoder.h"
#include "strev/error.h"
#include "strev/harness.h"
#include "strev/reversal.h"

namespace {

using namespace strev;

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, sep))
    if (!item.empty()) out.push_back(item);
  return out;
}

std::vector<ReversalSpec> parse_strategies(const std::string& text) {
  std::vector<ReversalSpec> out;
  for (const auto& s : split(text, ',')) out.push_back(ReversalSpec::parse(s));
  if (out.empty()) throw Error(ErrorCode::kConfig, "empty strategy list");
  return out;
}

// "0.5:0.5,1:0"
std::vector<std::pair<double, double>> parse_grid(const std::string& text) {
  std::vector<std::pair<double, double>> out;
  for (const auto& point : split(text, ',')) {
    auto parts = split(point, ':');
    if (parts.size() != 2)
      throw Error(ErrorCode::kConfig, "grid point '" + point + "' is not alpha:beta");
    try {
      out.emplace_back(std::stod(parts[0]), std::stod(parts[1]));
    } catch (const std::exception&) {
      throw Error(ErrorCode::kConfig, "grid point '" + point + "' is not numeric");
    }
  }
  if (out.empty()) throw Error(ErrorCode::kConfig, "empty fusion grid");
  return out;
}

struct RunOptions {
  std::string config;
  std::string out;
  std::string strategies;
  std::string grid;
  std::string mode;
  std::uint64_t seed = 0;
  int threads = 0;
};

void add_run_options(CLI::App* cmd, RunOptions& o) {
  cmd->add_option("--config", o.config, "JSON run config");
  cmd->add_option("--out", o.out, "Output directory for reports");
  cmd->add_option("--seed", o.seed, "Override the config seed");
  cmd->add_option("--threads", o.threads, "Worker threads");
}

RunConfig resolve(const RunOptions& o, const CLI::App* cmd) {
  RunConfig cfg = o.config.empty() ? RunConfig{} : load_run_config(o.config);
  if (!o.out.empty()) cfg.output_dir = o.out;
  if (cmd->count("--seed")) cfg.seed = o.seed;
  if (o.threads > 0) cfg.threads = o.threads;
  if (!o.strategies.empty()) cfg.strategies = parse_strategies(o.strategies);
  if (!o.grid.empty()) cfg.grid = parse_grid(o.grid);
  if (o.mode == "cross_attention") cfg.fusion_mode = FusionMode::kCrossAttention;
  else if (o.mode == "weighted") cfg.fusion_mode = FusionMode::kWeighted;
  else if (!o.mode.empty()) throw Error(ErrorCode::kConfig, "unknown fusion mode '" + o.mode + "'");
  cfg.validate();
  return cfg;
}

void print_error(std::string_view code, const std::string& message) {
  nlohmann::json j = {{"error", {{"code", code}, {"message", message}}}};
  std::cerr << j.dump() << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Speech time reversal toolkit: reversal, embeddings and evaluation runs."};
  app.require_subcommand(1);

  RunOptions sweep_opts;
  auto* sweep = app.add_subcommand("sweep", "Score every reversal strategy against the originals");
  add_run_options(sweep, sweep_opts);
  sweep->add_option("--strategies", sweep_opts.strategies, "Comma list, e.g. 20,50ms,full");

  RunOptions ablate_opts;
  auto* ablate = app.add_subcommand("ablate", "Score forward/reversed fusion over a weight grid");
  add_run_options(ablate, ablate_opts);
  ablate->add_option("--grid", ablate_opts.grid, "Comma list of alpha:beta, e.g. 0.5:0.5,1:0");
  ablate->add_option("--mode", ablate_opts.mode, "weighted or cross_attention");

  std::string embed_in, embed_ckpt, embed_reverse, embed_out;
  auto* embed = app.add_subcommand("embed", "Print the speaker embedding of a WAV file as JSON");
  embed->add_option("input", embed_in, "Input WAV")->required();
  embed->add_option("--checkpoint", embed_ckpt, "Encoder checkpoint (default: mel statistics)");
  embed->add_option("--reverse", embed_reverse, "Reverse first: full or a window in ms");
  embed->add_option("--out", embed_out, "Write JSON here instead of stdout");

  std::string rev_in, rev_out, rev_strategy = "full";
  auto* reverse = app.add_subcommand("reverse", "Time-reverse a WAV file");
  reverse->add_option("input", rev_in, "Input WAV")->required();
  reverse->add_option("output", rev_out, "Output WAV")->required();
  reverse->add_option("--strategy", rev_strategy, "full or a window in ms")->capture_default_str();

  std::string synth_out;
  int synth_speakers = 6, synth_utts = 4;
  std::uint64_t synth_seed = 7;
  auto* synth = app.add_subcommand("synth", "Write a synthetic multi-speaker corpus");
  synth->add_option("--out", synth_out, "Output directory")->required();
  synth->add_option("--speakers", synth_speakers, "Speakers")->capture_default_str();
  synth->add_option("--utterances", synth_utts, "Utterances per speaker")->capture_default_str();
  synth->add_option("--seed", synth_seed, "Seed")->capture_default_str();

  std::string train_corpus, train_out;
  int train_speakers = 6, train_utts = 4, train_steps = 200, train_dim = 64, train_heads = 4;
  std::uint64_t train_seed = 7;
  auto* train = app.add_subcommand("train-encoder", "Train the attention speaker encoder");
  train->add_option("--corpus", train_corpus, "Directory of spk_utt.wav files (default: synthetic)");
  train->add_option("--out", train_out, "Checkpoint path")->required();
  train->add_option("--speakers", train_speakers, "Synthetic speakers")->capture_default_str();
  train->add_option("--utterances", train_utts, "Synthetic utterances per speaker")->capture_default_str();
  train->add_option("--steps", train_steps, "Optimisation steps")->capture_default_str();
  train->add_option("--model-dim", train_dim, "Attention width")->capture_default_str();
  train->add_option("--heads", train_heads, "Attention heads")->capture_default_str();
  train->add_option("--seed", train_seed, "Seed")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    print_error("usage", e.what());
    return 2;
  }

  try {
    if (*sweep) {
      RunConfig cfg = resolve(sweep_opts, sweep);
      EvaluationReport r = run_reversal_sweep(cfg);
      emit_report(r, cfg.output_dir);
      std::cout << report_csv(r);
    } else if (*ablate) {
      RunConfig cfg = resolve(ablate_opts, ablate);
      EvaluationReport r = run_fusion_ablation(cfg);
      emit_report(r, cfg.output_dir);
      std::cout << report_csv(r);
    } else if (*embed) {
      Waveform w = read_wav(embed_in);
      w.id = std::filesystem::path(embed_in).stem().string();
      Embedder embedder = embed_ckpt.empty() ? Embedder::mel_stats()
                                             : Embedder::attention(load_checkpoint(embed_ckpt));
      std::optional<ReversalSpec> spec;
      if (!embed_reverse.empty()) spec = ReversalSpec::parse(embed_reverse);
      std::string text = embedding_to_json(embedder.embed(w, spec));
      if (embed_out.empty()) {
        std::cout << text;
      } else {
        std::ofstream out(embed_out);
        if (!(out << text)) throw Error(ErrorCode::kIo, "cannot write " + embed_out);
      }
    } else if (*reverse) {
      Waveform w = read_wav(rev_in);
      write_wav(apply_reversal(w, ReversalSpec::parse(rev_strategy)), rev_out);
    } else if (*synth) {
      Corpus corpus = synth_corpus(synth_speakers, synth_utts, synth_seed);
      write_corpus(corpus, synth_out);
      std::cout << corpus.size() << " utterances written to " << synth_out << '\n';
    } else if (*train) {
      Corpus corpus = train_corpus.empty()
                          ? synth_corpus(train_speakers, train_utts, train_seed)
                          : load_corpus_dir(train_corpus);
      TrainConfig tc;
      tc.steps = train_steps;
      EncoderParams init = EncoderParams::initialize(
          {kNumMels, train_dim, train_heads, kEmbeddingDim}, train_seed);
      TrainResult r = train_encoder(corpus, init, tc, MelFrontend{});
      save_checkpoint(r.params, train_out);
      std::cout << "steps " << r.loss_trace.size();
      if (!r.loss_trace.empty())
        std::cout << " loss " << r.loss_trace.front() << " -> " << r.loss_trace.back();
      std::cout << '\n';
    }
  } catch (const Error& e) {
    print_error(error_code_name(e.code()), e.what());
    return 1;
  } catch (const std::exception& e) {
    print_error("internal", e.what());
    return 1;
  }
  return 0;
}
