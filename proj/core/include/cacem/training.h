// cacem/training.h

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

#ifndef CACEM_TRAINING_H_
#define CACEM_TRAINING_H_

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "cacem/corpus.h"
#include "cacem/model.h"

namespace cacem {

struct OptimConfig {
  double peak_lr = 1e-3;
  int warmup_steps = 300;
  int total_steps = 3000;
  int batch_size = 16;
  double grad_clip = 5.0;
  double beta1 = 0.9;
  double beta2 = 0.98;
  double epsilon = 1e-9;

  void Validate() const;
  nlohmann::json ToJson() const;
  static OptimConfig FromJson(const nlohmann::json &j, OptimConfig defaults);
};

/// Linear warm-up to peak_lr, then inverse square-root decay. step >= 1.
double NoamRate(int step, int warmup_steps, double peak_lr);

struct StepLog {
  int step = 0;
  double loss = 0.0;
  double lr = 0.0;
};

using StepCallback = std::function<void(int step, const Model &model)>;

struct BaseTrainConfig {
  ModelConfig model;
  OptimConfig optim;
  std::uint64_t seed = 1;
  double quantity_weight = 1.0;
  int snapshot_every = 0;  // 0: no snapshots
  StepCallback on_snapshot;
};

struct TrainResult {
  Model model;
  std::vector<StepLog> log;
};

/// Cross-entropy on the E-branch decode (alpha scaled to the reference
/// length) plus the quantity loss. Throws kDivergence on a non-finite loss.
TrainResult train_base(const Corpus &train, const BaseTrainConfig &config);

struct DecodedUtt {
  std::string id;
  Tokens tokens;
};

struct DecodeResult {
  std::vector<DecodedUtt> decodes;
  double corpus_cer = 0.0;
  std::size_t empty_decodes = 0;
};

DecodeResult decode_corpus(const Model &model, const Corpus &corpus,
                           std::optional<double> noise_sigma = std::nullopt);

/// Copy of corpus with hyp := decode.
Corpus WithHypotheses(const Corpus &corpus, const DecodeResult &decodes);

struct CemTrainConfig {
  CemVariant variant = CemVariant::kCifAligned;
  OptimConfig optim{1e-3, 200, 2000, 16, 5.0, 0.9, 0.98, 1e-9};
  std::uint64_t seed = 2;
  // Weight of the cross-entropy that keeps the shared decoder's E-branch
  // decode on the base model's decode (CIF-aligned variant only).
  double decode_keep_weight = 1.0;
  // When set, every sampled example is scored on a fresh corruption of its
  // reference instead of the stored hypothesis, so the head never sees the
  // same error pattern twice.
  std::optional<CorruptionPlan> redraw;
};

struct CemTrainResult {
  Model model;
  std::vector<StepLog> log;
  std::size_t skipped_utts = 0;
};

/// Fine-tunes decoder (+embedding, output) and trains a fresh confidence
/// head under BCE with encoder and predictor frozen. The corpus must carry
/// hypotheses unless config.redraw is set.
CemTrainResult train_cem(const Model &base, const Corpus &train,
                         const CemTrainConfig &config);

/// Held-out BCE of a trained head (labels per variant); used for descent checks.
double HeldOutBce(const Model &cem, const Corpus &corpus, const Model &base);

}  // namespace cacem

#endif  // CACEM_TRAINING_H_
