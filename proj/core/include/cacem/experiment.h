// cacem/experiment.h

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

#ifndef CACEM_EXPERIMENT_H_
#define CACEM_EXPERIMENT_H_

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "cacem/corpus.h"
#include "cacem/training.h"

namespace cacem {

/// End-to-end run: corpus, base model, test sets, both confidence heads.
struct ExperimentConfig {
  // n_utts covers train + held-out.
  CorpusSpec corpus = [] {
    CorpusSpec s;
    s.n_utts = 2500;
    return s;
  }();
  std::size_t n_train = 2000;
  ModelConfig model;
  OptimConfig base_optim;
  double quantity_weight = 1.0;
  CemTrainConfig cem;
  CorruptionPlan train_corruption;
  // Redraw the CEM training hypotheses on every sample rather than fixing
  // one corruption per utterance.
  bool redraw_hypotheses = true;
  // Test sets: decode the held-out split with early checkpoints and keep
  // the one closest to each target; fall back to corruption when none is
  // within tolerance.
  std::vector<double> test_targets{0.15, 0.30};
  double target_tolerance = 0.075;
  int snapshot_every = 100;
  int snapshot_until = 1500;
  std::uint64_t seed = 1;

  void Validate() const;
  nlohmann::json ToJson() const;
  /// Missing keys keep the defaults; layout mirrors ToJson.
  static ExperimentConfig FromJson(const nlohmann::json &j);
  /// Same settings with every stage seed derived from `seed`.
  ExperimentConfig WithSeed(std::uint64_t seed) const;
};

struct TestSet {
  std::string name;
  double target_cer = 0.0;
  double cer = 0.0;
  std::string source;  // "checkpoint@<step>" or "corruption"
  Corpus corpus;       // held-out split with hypotheses
};

struct SnapshotDecode {
  int step = 0;
  DecodeResult decode;
};

/// Picks the snapshot whose corpus CER is closest to target.
TestSet BuildTestSet(const Corpus &heldout, const std::vector<SnapshotDecode> &snapshots,
                     double target, double tolerance, std::uint64_t seed);

using ProgressFn = std::function<void(const std::string &)>;

struct ExperimentArtifacts {
  Corpus train;
  Corpus test;
  std::optional<TrainResult> base;
  double base_seconds = 0.0;
  DecodeResult base_decode;  // final base model on the held-out split
  std::vector<SnapshotDecode> snapshots;
  std::vector<TestSet> test_sets;
  std::optional<CemTrainResult> cif_aligned;
  std::optional<CemTrainResult> hyp_synchronous;

  const TestSet &Set(const std::string &name) const;
};

ExperimentArtifacts run_experiment(const ExperimentConfig &config,
                                   const ProgressFn &progress = {},
                                   bool train_heads = true);

/// "test15" for 0.15 etc.
std::string TestSetName(double target);

}  // namespace cacem

#endif  // CACEM_EXPERIMENT_H_
