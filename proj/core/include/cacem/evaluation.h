// cacem/evaluation.h

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

#ifndef CACEM_EVALUATION_H_
#define CACEM_EVALUATION_H_

#include <optional>
#include <string>
#include <vector>

#include "cacem/corpus.h"
#include "cacem/metrics.h"
#include "cacem/model.h"

namespace cacem {

/// Models taking part in an evaluation; null entries are skipped. The base
/// model provides the softmax scores.
struct EvaluationModels {
  const Model *base = nullptr;
  const Model *hyp_synchronous = nullptr;
  const Model *cif_aligned = nullptr;
};

struct EvaluateOptions {
  int bins = kDefaultBins;
  EceUMode ece_u_mode = EceUMode::kUtteranceMean;
  std::size_t thresholds = kDefaultThresholds;
  std::optional<double> noise_sigma;  // regenerate features at this level
};

struct TokenScoreRow {
  std::string utt_id;
  ConfidenceVariant variant = ConfidenceVariant::kSoftmax;
  std::size_t position = 0;
  int token = 0;
  double score = 0.0;
  int label = 0;
};

struct VariantEvaluation {
  ConfidenceVariant variant = ConfidenceVariant::kSoftmax;
  std::vector<TokenScoreRow> rows;
  std::vector<UttRecord> utts;
  MetricsReport report;

  std::vector<ScoredToken> Tokens() const;
};

struct EvaluationResult {
  std::vector<VariantEvaluation> variants;
  std::vector<std::string> skipped;  // empty hypothesis or empty decode
  double hyp_cer = 0.0;              // corpus CER of the evaluated hypotheses

  const VariantEvaluation *Find(ConfidenceVariant v) const;
};

/// Scores every utterance's hypothesis with each available variant.
///   softmax          forced on the hypothesis when its length equals the
///                    base decode length (labels against the reference),
///                    otherwise the base decode (labels against the
///                    hypothesis); utterance CER is that of the hypothesis
///   hyp_synchronous  labels of the hypothesis against the reference
///   cif_aligned      scores the model's own decode, labelled against the
///                    hypothesis; utterance CER is that of the hypothesis
/// Utterances with an empty hypothesis or an empty CIF-aligned decode are
/// skipped for every variant so all reports cover the same set.
EvaluationResult evaluate(const EvaluationModels &models, const Corpus &test,
                          const EvaluateOptions &options = {});

/// Per-token case table. Columns follow the reference/hypothesis alignment;
/// deletion slots print `**`.
struct CaseStudyRow {
  std::string name;
  std::vector<std::string> cells;
  std::string summary;
};

struct CaseStudy {
  std::string utt_id;
  std::vector<CaseStudyRow> rows;
  double accuracy = 0.0;
  std::vector<ConfidenceResult> results;  // softmax, hyp_synchronous, cif_aligned (if present)
  FiringResult trace;                     // CIF trace of the cif_aligned model
};

CaseStudy case_study(const EvaluationModels &models, const Corpus &corpus,
                     const std::string &utt_id);
CaseStudy case_study(const EvaluationModels &models, const Corpus &corpus,
                     const Utterance &utt);

struct NoiseSweepRow {
  double sigma = 0.0;
  double cer = 0.0;           // CIF-aligned model's own decode against the reference
  double conf_gt = 0.0;       // mean utterance confidence scoring the reference
  double conf_hyp = 0.0;      // mean utterance confidence scoring the decode
  std::size_t n_utts = 0;
  std::size_t empty_decodes = 0;
};

/// Features regenerated per level from the stored seeds; sigmas ascending.
std::vector<NoiseSweepRow> noise_sweep(const Model &cif_aligned, const Corpus &test,
                                       const std::vector<double> &sigmas);

}  // namespace cacem

#endif  // CACEM_EVALUATION_H_
