// core/src/corpus.cc

// Copyright 2026  The cacem Authors

// See ../../LICENSE for clarification regarding multiple authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#include "cacem/corpus.h"

#include <fstream>
#include <sstream>

#include "cacem/errors.h"
#include "cacem/rng.h"

namespace cacem {

namespace {

std::string MetaPath(const std::string &path) { return path + ".meta.json"; }

}  // namespace

void CorpusSpec::Validate() const {
  if (vocab_size < 2) Fail(ErrorKind::kContract, "corpus vocab_size must be >= 2");
  if (feature_dim < 1) Fail(ErrorKind::kContract, "corpus feature_dim must be >= 1");
  if (min_frames_per_token < 1 || max_frames_per_token < min_frames_per_token)
    Fail(ErrorKind::kContract, "frames_per_token range is empty");
  if (min_len < 1 || max_len < min_len)
    Fail(ErrorKind::kContract, "utt_len range is empty");
  if (!(noise_sigma >= 0.0)) Fail(ErrorKind::kContract, "noise_sigma must be >= 0");
  if (n_utts < 0) Fail(ErrorKind::kContract, "n_utts must be >= 0");
}

nlohmann::json CorpusSpec::ToJson() const {
  return {{"vocab_size", vocab_size},
          {"feature_dim", feature_dim},
          {"frames_per_token", {min_frames_per_token, max_frames_per_token}},
          {"prototype_seed", prototype_seed},
          {"prototype_scale", prototype_scale},
          {"noise_sigma", noise_sigma},
          {"n_utts", n_utts},
          {"utt_len", {min_len, max_len}},
          {"seed", seed},
          {"id_prefix", id_prefix}};
}

CorpusSpec CorpusSpec::FromJson(const nlohmann::json &j) {
  CorpusSpec s;
  s.vocab_size = j.value("vocab_size", s.vocab_size);
  s.feature_dim = j.value("feature_dim", s.feature_dim);
  if (j.contains("frames_per_token")) {
    s.min_frames_per_token = j["frames_per_token"].at(0).get<int>();
    s.max_frames_per_token = j["frames_per_token"].at(1).get<int>();
  }
  s.prototype_seed = j.value("prototype_seed", s.prototype_seed);
  s.prototype_scale = j.value("prototype_scale", s.prototype_scale);
  s.noise_sigma = j.value("noise_sigma", s.noise_sigma);
  s.n_utts = j.value("n_utts", s.n_utts);
  if (j.contains("utt_len")) {
    s.min_len = j["utt_len"].at(0).get<int>();
    s.max_len = j["utt_len"].at(1).get<int>();
  }
  s.seed = j.value("seed", s.seed);
  s.id_prefix = j.value("id_prefix", s.id_prefix);
  s.Validate();
  return s;
}

const Utterance *Corpus::Find(const std::string &id) const {
  for (const auto &u : utts)
    if (u.id == id) return &u;
  return nullptr;
}

DenseMatrix Corpus::Frames(const Utterance &u,
                           std::optional<double> noise_sigma) const {
  if (u.frames) {
    if (noise_sigma && *noise_sigma != spec.noise_sigma)
      Fail(ErrorKind::kData, "utterance " + u.id +
                                 " has stored frames; cannot re-render at a new noise level");
    return *u.frames;
  }
  if (!u.regen_seed)
    Fail(ErrorKind::kData, "utterance " + u.id + " has neither frames nor regen_seed");
  return RenderFrames(spec, Prototypes(spec), u.ref, *u.regen_seed,
                      noise_sigma.value_or(spec.noise_sigma));
}

std::pair<Corpus, Corpus> Corpus::Split(std::size_t n) const {
  std::pair<Corpus, Corpus> out{{spec, {}}, {spec, {}}};
  n = std::min(n, utts.size());
  out.first.utts.assign(utts.begin(), utts.begin() + static_cast<std::ptrdiff_t>(n));
  out.second.utts.assign(utts.begin() + static_cast<std::ptrdiff_t>(n), utts.end());
  return out;
}

DenseMatrix Prototypes(const CorpusSpec &spec) {
  Rng rng(spec.prototype_seed);
  DenseMatrix p(static_cast<std::size_t>(spec.vocab_size),
                static_cast<std::size_t>(spec.feature_dim));
  for (double &x : p.values()) x = spec.prototype_scale * rng.Normal();
  return p;
}

DenseMatrix RenderFrames(const CorpusSpec &spec, const DenseMatrix &prototypes,
                         const Tokens &ref, std::uint64_t regen_seed,
                         double noise_sigma) {
  // Frame counts and noise come from separate streams so that the frame
  // layout does not depend on the noise level.
  Rng layout(DeriveSeed(regen_seed, 1));
  Rng noise(DeriveSeed(regen_seed, 2));
  std::vector<int> counts(ref.size());
  std::size_t total = 0;
  for (std::size_t i = 0; i < ref.size(); ++i) {
    counts[i] = static_cast<int>(
        layout.Range(spec.min_frames_per_token, spec.max_frames_per_token));
    total += static_cast<std::size_t>(counts[i]);
  }
  DenseMatrix frames(total, prototypes.cols());
  std::size_t row = 0;
  for (std::size_t i = 0; i < ref.size(); ++i) {
    if (ref[i] < 0 || static_cast<std::size_t>(ref[i]) >= prototypes.rows())
      Fail(ErrorKind::kLookup, "token id " + std::to_string(ref[i]) +
                                   " outside corpus vocabulary");
    auto proto = prototypes.row(static_cast<std::size_t>(ref[i]));
    for (int k = 0; k < counts[i]; ++k, ++row) {
      auto dst = frames.row(row);
      for (std::size_t c = 0; c < dst.size(); ++c) {
        const double z = noise.Normal();
        dst[c] = proto[c] + noise_sigma * z;
      }
    }
  }
  return frames;
}

Corpus gen_corpus(const CorpusSpec &spec) {
  spec.Validate();
  Corpus corpus;
  corpus.spec = spec;
  corpus.utts.reserve(static_cast<std::size_t>(spec.n_utts));
  for (int i = 0; i < spec.n_utts; ++i) {
    Rng rng(DeriveSeed(spec.seed, static_cast<std::uint64_t>(i)));
    Utterance u;
    char id[32];
    std::snprintf(id, sizeof(id), "%06d", i);
    u.id = spec.id_prefix + id;
    const auto len = rng.Range(spec.min_len, spec.max_len);
    for (std::int64_t k = 0; k < len; ++k) {
      int token;
      do {
        token = static_cast<int>(rng.Below(static_cast<std::uint64_t>(spec.vocab_size)));
      } while (!u.ref.empty() && token == u.ref.back());
      u.ref.push_back(token);
    }
    u.regen_seed = rng.NextU64();
    corpus.utts.push_back(std::move(u));
  }
  return corpus;
}

nlohmann::json UtteranceToJson(const Utterance &u, const Corpus &corpus,
                               bool materialize) {
  nlohmann::json j = {{"id", u.id}, {"ref", u.ref}};
  if (u.hyp) j["hyp"] = *u.hyp;
  if (materialize || u.frames) {
    DenseMatrix f = corpus.Frames(u);
    nlohmann::json rows = nlohmann::json::array();
    for (std::size_t r = 0; r < f.rows(); ++r)
      rows.push_back(std::vector<double>(f.row(r).begin(), f.row(r).end()));
    j["frames"] = std::move(rows);
  } else {
    j["frames"] = {{"regen_seed", *u.regen_seed}};
  }
  return j;
}

Utterance UtteranceFromJson(const nlohmann::json &j) {
  Utterance u;
  u.id = j.at("id").get<std::string>();
  u.ref = j.at("ref").get<Tokens>();
  if (j.contains("hyp") && !j["hyp"].is_null()) u.hyp = j["hyp"].get<Tokens>();
  const auto &f = j.at("frames");
  if (f.is_object()) {
    u.regen_seed = f.at("regen_seed").get<std::uint64_t>();
  } else {
    const std::size_t rows = f.size();
    const std::size_t cols = rows ? f[0].size() : 0;
    DenseMatrix m(rows, cols);
    for (std::size_t r = 0; r < rows; ++r) {
      if (f[r].size() != cols)
        Fail(ErrorKind::kData, "utterance " + u.id + " has ragged frames");
      for (std::size_t c = 0; c < cols; ++c) m(r, c) = f[r][c].get<double>();
    }
    u.frames = std::move(m);
  }
  return u;
}

void WriteCorpus(const std::string &path, const Corpus &corpus, bool materialize) {
  std::ofstream os(path, std::ios::trunc);
  if (!os) Fail(ErrorKind::kIo, "cannot open " + path + " for writing");
  for (const auto &u : corpus.utts)
    os << UtteranceToJson(u, corpus, materialize).dump() << '\n';
  std::ofstream meta(MetaPath(path), std::ios::trunc);
  if (!meta) Fail(ErrorKind::kIo, "cannot open " + MetaPath(path) + " for writing");
  meta << corpus.spec.ToJson().dump(2) << '\n';
  if (!os || !meta) Fail(ErrorKind::kIo, "failed writing corpus " + path);
}

Corpus ReadCorpus(const std::string &path) {
  Corpus corpus;
  {
    std::ifstream meta(MetaPath(path));
    if (meta) {
      try {
        corpus.spec = CorpusSpec::FromJson(nlohmann::json::parse(meta));
      } catch (const nlohmann::json::exception &e) {
        Fail(ErrorKind::kData, MetaPath(path) + ": " + e.what());
      }
    }
  }
  std::ifstream is(path);
  if (!is) Fail(ErrorKind::kIo, "cannot open corpus " + path);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty()) continue;
    try {
      corpus.utts.push_back(UtteranceFromJson(nlohmann::json::parse(line)));
    } catch (const nlohmann::json::exception &e) {
      Fail(ErrorKind::kData, path + ":" + std::to_string(lineno) + ": " + e.what());
    }
  }
  return corpus;
}

Tokens CorruptWithPlan(std::span<const int> ref, const CorruptionPlan &plan,
                       int vocab_size, Rng &rng) {
  const double shares = plan.sub_share + plan.del_share + plan.ins_share;
  if (!(shares > 0.0)) Fail(ErrorKind::kContract, "corruption shares sum to zero");
  const double level = rng.Uniform(plan.min_rate, plan.max_rate);
  CorruptionRates r{level * plan.sub_share / shares, level * plan.del_share / shares,
                    level * plan.ins_share / shares};
  return corrupt(ref, r, vocab_size, rng);
}

void AttachCorruptedHypotheses(Corpus &corpus, const CorruptionPlan &plan,
                               std::uint64_t seed) {
  for (std::size_t i = 0; i < corpus.utts.size(); ++i) {
    Rng rng(DeriveSeed(seed, i));
    corpus.utts[i].hyp = CorruptWithPlan(corpus.utts[i].ref, plan, corpus.spec.vocab_size, rng);
  }
}

void AttachCorruptedHypotheses(Corpus &corpus, const CorruptionRates &rates,
                               std::uint64_t seed) {
  for (std::size_t i = 0; i < corpus.utts.size(); ++i) {
    Rng rng(DeriveSeed(seed, i));
    corpus.utts[i].hyp = corrupt(corpus.utts[i].ref, rates, corpus.spec.vocab_size, rng);
  }
}

}  // namespace cacem
