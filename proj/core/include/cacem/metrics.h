// cacem/metrics.h

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

#ifndef CACEM_METRICS_H_
#define CACEM_METRICS_H_

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

namespace cacem {

struct ScoredToken {
  double score = 0.0;
  int label = 0;
};

/// Utterance-level operands: average confidence against 1 - CER.
struct UttRecord {
  std::string utt_id;
  double avg_conf = 0.0;
  double cer = 0.0;
  bool has_deletion = false;
  std::size_t token_count = 0;  // reference length
  std::size_t edit_errors = 0;  // S + D + I of the scored hypothesis

  /// 1 - min(CER, 1).
  double Accuracy() const;
};

struct RocPoint {
  double threshold = 0.0;
  double tpr = 0.0;
  double fpr = 0.0;
};

constexpr std::size_t kDefaultThresholds = 201;
constexpr int kDefaultBins = 10;

/// k / (count - 1) for k = 0..count-1.
std::vector<double> EqualSpacedThresholds(std::size_t count = kDefaultThresholds);

/// Positive prediction iff score >= threshold.
std::vector<RocPoint> roc_points(std::span<const ScoredToken> tokens,
                                 std::span<const double> thresholds);

enum class AucMethod {
  kExactRank,    // Mann-Whitney statistic, ties count one half
  kEqualSpaced,  // trapezoid over the ROC sampled at equally spaced thresholds
};
const char *AucMethodName(AucMethod m);

double auc(std::span<const ScoredToken> tokens,
           AucMethod method = AucMethod::kExactRank,
           std::size_t thresholds = kDefaultThresholds);

/// sum_m |B_m|/n * |acc(B_m) - conf(B_m)| over equal-width score bins
/// [k/M, (k+1)/M), last bin closed.
double ece(std::span<const ScoredToken> tokens, int bins = kDefaultBins);

enum class EceUMode {
  kUtteranceMean,  // |B_m|/n * mean_{u in B_m} |acc(u) - conf(u)|
  kBinLevel,       // |B_m|/n * |mean acc(B_m) - mean conf(B_m)|
};
const char *EceUModeName(EceUMode m);

double ece_u(std::span<const UttRecord> utts, int bins = kDefaultBins,
             EceUMode mode = EceUMode::kUtteranceMean);

/// sqrt(mean (avg_conf - acc)^2).
double rmse_u(std::span<const UttRecord> utts);

/// Token-weighted error rate: sum edit_errors / sum token_count.
double corpus_error_rate(std::span<const UttRecord> utts);

struct FilterPoint {
  double threshold = 0.0;
  std::size_t subset_size = 0;
  std::optional<double> error_rate;  // nullopt for an empty subset
};

/// Keeps utterances with avg_conf >= threshold; thresholds ascending.
std::vector<FilterPoint> filter_curve(std::span<const UttRecord> utts,
                                      std::span<const double> thresholds);

std::pair<std::vector<UttRecord>, std::vector<UttRecord>> split_by_deletion(
    std::span<const UttRecord> utts);

struct MetricsReport {
  std::string variant;
  double auc = 0.0;
  double auc_equal_spaced = 0.0;
  double ece = 0.0;
  double ece_u = 0.0;
  EceUMode ece_u_mode = EceUMode::kUtteranceMean;
  double rmse_u = 0.0;
  double corpus_cer = 0.0;
  double mean_conf = 0.0;
  std::size_t n_utts = 0;
  std::size_t n_tokens = 0;
  int bins = kDefaultBins;
  std::vector<FilterPoint> curve_all;
  std::vector<FilterPoint> curve_no_deletion;
  std::vector<FilterPoint> curve_deletion;

  nlohmann::json ToJson() const;
};

MetricsReport BuildReport(const std::string &variant,
                          std::span<const ScoredToken> tokens,
                          std::span<const UttRecord> utts,
                          int bins = kDefaultBins,
                          EceUMode mode = EceUMode::kUtteranceMean,
                          std::size_t thresholds = kDefaultThresholds);

/// `threshold\tn\terror_rate`; empty subsets print `NA`.
void WriteCurveTsv(std::ostream &os, std::span<const FilterPoint> curve);

/// One row per report: variant, auc, auc_equal_spaced, ece, ece_u, rmse_u,
/// corpus_cer, mean_conf, n_utts, n_tokens.
void WriteSummaryTsv(std::ostream &os, std::span<const MetricsReport> reports);

}  // namespace cacem

#endif  // CACEM_METRICS_H_
