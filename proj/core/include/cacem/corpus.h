// cacem/corpus.h

// Copyright 2026  The cacem Authors

// See ../../../LICENSE for clarification regarding multiple authors
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

#ifndef CACEM_CORPUS_H_
#define CACEM_CORPUS_H_

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "cacem/labeling.h"
#include "cacem/matrix.h"

namespace cacem {

/// Synthetic token-to-frames task. Every token id owns a fixed random
/// prototype vector; an utterance is a token sequence (no immediate repeats,
/// so token runs are never ambiguous) and each token emits k frames equal to
/// its prototype plus Gaussian noise.
struct CorpusSpec {
  int vocab_size = 32;
  int feature_dim = 16;
  int min_frames_per_token = 2;
  int max_frames_per_token = 4;
  std::uint64_t prototype_seed = 1;
  double prototype_scale = 0.3;  // prototype entries ~ N(0, scale^2)
  double noise_sigma = 0.1;
  int n_utts = 2000;
  int min_len = 4;
  int max_len = 10;
  std::uint64_t seed = 7;  // token sequences and per-utterance regen seeds
  std::string id_prefix = "utt";

  void Validate() const;
  nlohmann::json ToJson() const;
  static CorpusSpec FromJson(const nlohmann::json &j);
};

struct Utterance {
  std::string id;
  Tokens ref;
  std::optional<Tokens> hyp;
  // Exactly one of frames / regen_seed is set.
  std::optional<DenseMatrix> frames;
  std::optional<std::uint64_t> regen_seed;
};

struct Corpus {
  CorpusSpec spec;
  std::vector<Utterance> utts;

  const Utterance *Find(const std::string &id) const;
  /// Frames as stored, or regenerated at the spec's noise level (or at
  /// `noise_sigma` when given; regenerated utterances only).
  DenseMatrix Frames(const Utterance &u,
                     std::optional<double> noise_sigma = std::nullopt) const;
  /// First n utterances / the rest.
  std::pair<Corpus, Corpus> Split(std::size_t n) const;
};

/// vocab_size x feature_dim prototype table.
DenseMatrix Prototypes(const CorpusSpec &spec);

DenseMatrix RenderFrames(const CorpusSpec &spec, const DenseMatrix &prototypes,
                         const Tokens &ref, std::uint64_t regen_seed,
                         double noise_sigma);

Corpus gen_corpus(const CorpusSpec &spec);

/// Writes `path` (JSONL, one utterance per line) and `path.meta.json`
/// (the CorpusSpec). With materialize, frames are written inline instead of
/// {"regen_seed": s}.
void WriteCorpus(const std::string &path, const Corpus &corpus,
                 bool materialize = false);
Corpus ReadCorpus(const std::string &path);

nlohmann::json UtteranceToJson(const Utterance &u, const Corpus &corpus,
                               bool materialize);
Utterance UtteranceFromJson(const nlohmann::json &j);

/// Per-utterance corruption with a total error level drawn uniformly from
/// [min_rate, max_rate] and split into substitution / deletion / insertion by
/// the given shares.
struct CorruptionPlan {
  double min_rate = 0.0;
  double max_rate = 0.4;
  double sub_share = 0.5;
  double del_share = 0.25;
  double ins_share = 0.25;
};
/// One draw of the plan: level, then the corrupted copy of ref.
Tokens CorruptWithPlan(std::span<const int> ref, const CorruptionPlan &plan,
                       int vocab_size, Rng &rng);
void AttachCorruptedHypotheses(Corpus &corpus, const CorruptionPlan &plan,
                               std::uint64_t seed);
void AttachCorruptedHypotheses(Corpus &corpus, const CorruptionRates &rates,
                               std::uint64_t seed);

}  // namespace cacem

#endif  // CACEM_CORPUS_H_
