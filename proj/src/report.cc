// src/report.cc

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

#include <chrono>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "strev/error.h"
#include "strev/harness.h"

namespace strev {

using nlohmann::json;

namespace {

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIo, "cannot write " + path.string());
  out << text;
  if (!out) throw Error(ErrorCode::kIo, "write failed for " + path.string());
}

}  // namespace

std::string current_timestamp() {
  std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm utc{};
  gmtime_r(&now, &utc);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &utc);
  return buf;
}

std::string report_csv(const EvaluationReport& r) {
  std::ostringstream os;
  const std::string tail = "," + r.meta.config_hash + "," + std::to_string(r.meta.seed) + "\n";
  if (r.meta.kind == "ablation") {
    os << "alpha,beta,ss,config_hash,seed\n";
    for (const auto& f : r.fusion) os << fmt(f.alpha) << ',' << fmt(f.beta) << ',' << fmt(f.ss) << tail;
  } else {
    os << "strategy,ss,pitch_corr,utterances,config_hash,seed\n";
    for (const auto& s : r.strategies) {
      os << s.strategy << ',' << fmt(s.ss) << ','
         << (s.pitch_correlation ? fmt(*s.pitch_correlation) : std::string()) << ','
         << s.utterances << tail;
    }
  }
  return os.str();
}

std::string report_to_json(const EvaluationReport& r) {
  json j;
  j["metadata"] = {{"kind", r.meta.kind},
                   {"config_hash", r.meta.config_hash},
                   {"seed", r.meta.seed},
                   {"version", r.meta.version},
                   {"embedder", r.meta.embedder},
                   {"created_at", r.meta.created_at}};
  json strategies = json::array();
  for (const auto& s : r.strategies) {
    json row = {{"strategy", s.strategy}, {"ss", s.ss}, {"utterances", s.utterances}};
    row["pitch_correlation"] = s.pitch_correlation ? json(*s.pitch_correlation) : json(nullptr);
    strategies.push_back(row);
  }
  j["strategies"] = strategies;
  json fusion = json::array();
  for (const auto& f : r.fusion)
    fusion.push_back({{"alpha", f.alpha}, {"beta", f.beta}, {"ss", f.ss}});
  j["fusion"] = fusion;
  j["baseline_ss"] = r.baseline_ss ? json(*r.baseline_ss) : json(nullptr);
  return j.dump(2) + "\n";
}

EvaluationReport report_from_json(const std::string& text) {
  try {
    json j = json::parse(text);
    EvaluationReport r;
    const json& m = j.at("metadata");
    r.meta.kind = m.at("kind").get<std::string>();
    r.meta.config_hash = m.at("config_hash").get<std::string>();
    r.meta.seed = m.at("seed").get<std::uint64_t>();
    r.meta.version = m.at("version").get<std::string>();
    r.meta.embedder = m.at("embedder").get<std::string>();
    r.meta.created_at = m.at("created_at").get<std::string>();
    for (const auto& s : j.at("strategies")) {
      StrategyScore score;
      score.strategy = s.at("strategy").get<std::string>();
      score.ss = s.at("ss").get<double>();
      score.utterances = s.at("utterances").get<std::size_t>();
      if (!s.at("pitch_correlation").is_null())
        score.pitch_correlation = s["pitch_correlation"].get<double>();
      r.strategies.push_back(std::move(score));
    }
    for (const auto& f : j.at("fusion"))
      r.fusion.push_back({f.at("alpha").get<double>(), f.at("beta").get<double>(),
                          f.at("ss").get<double>()});
    if (!j.at("baseline_ss").is_null()) r.baseline_ss = j["baseline_ss"].get<double>();
    return r;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kMalformedHeader, std::string("bad report: ") + e.what());
  }
}

void emit_report(const EvaluationReport& r, const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw Error(ErrorCode::kIo, "cannot create " + dir.string());
  write_text(dir / (r.meta.kind + ".json"), report_to_json(r));
  write_text(dir / (r.meta.kind + ".csv"), report_csv(r));
}

EvaluationReport read_report(const std::filesystem::path& json_path) {
  std::ifstream in(json_path);
  if (!in) throw Error(ErrorCode::kMissingFile, "cannot open " + json_path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return report_from_json(ss.str());
}

std::string embedding_to_json(const SpeakerEmbedding& e) {
  json j;
  j["source_id"] = e.source_id;
  j["reversed"] = e.reversed;
  j["values"] = std::vector<double>(e.values.data(), e.values.data() + e.values.size());
  return j.dump() + "\n";
}

}  // namespace strev
