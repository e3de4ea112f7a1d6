// core/src/metrics.cc

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

#include "cacem/metrics.h"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <numeric>
#include <ostream>

#include "cacem/errors.h"

namespace cacem {

namespace {

// Summing in sorted order keeps results independent of input order.
double SortedSum(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  return std::accumulate(v.begin(), v.end(), 0.0);
}

std::pair<std::size_t, std::size_t> ClassCounts(std::span<const ScoredToken> tokens) {
  std::size_t pos = 0;
  for (const auto &t : tokens) pos += t.label != 0;
  return {pos, tokens.size() - pos};
}

void RequireBothClasses(std::span<const ScoredToken> tokens, const char *op) {
  auto [pos, neg] = ClassCounts(tokens);
  if (pos == 0 || neg == 0)
    Fail(ErrorKind::kDegenerate,
         std::string(op) + ": need both classes, got " + std::to_string(pos) +
             " positive and " + std::to_string(neg) + " negative tokens");
}

std::size_t BinOf(double score, int bins) {
  const double b = std::floor(score * bins);
  if (b < 0) return 0;
  return std::min(static_cast<std::size_t>(b), static_cast<std::size_t>(bins - 1));
}

void RequireBins(int bins) {
  if (bins < 1) Fail(ErrorKind::kContract, "bin count must be >= 1");
}

}  // namespace

double UttRecord::Accuracy() const { return 1.0 - std::min(cer, 1.0); }

std::vector<double> EqualSpacedThresholds(std::size_t count) {
  if (count < 2) Fail(ErrorKind::kContract, "need at least two thresholds");
  std::vector<double> t(count);
  for (std::size_t k = 0; k < count; ++k)
    t[k] = static_cast<double>(k) / static_cast<double>(count - 1);
  return t;
}

std::vector<RocPoint> roc_points(std::span<const ScoredToken> tokens,
                                 std::span<const double> thresholds) {
  RequireBothClasses(tokens, "roc_points");
  auto [pos, neg] = ClassCounts(tokens);
  std::vector<RocPoint> out;
  out.reserve(thresholds.size());
  for (double th : thresholds) {
    std::size_t tp = 0, fp = 0;
    for (const auto &t : tokens)
      if (t.score >= th) (t.label ? tp : fp)++;
    out.push_back({th, static_cast<double>(tp) / static_cast<double>(pos),
                   static_cast<double>(fp) / static_cast<double>(neg)});
  }
  return out;
}

const char *AucMethodName(AucMethod m) {
  return m == AucMethod::kExactRank ? "exact_rank" : "equal_spaced";
}

double auc(std::span<const ScoredToken> tokens, AucMethod method,
           std::size_t thresholds) {
  RequireBothClasses(tokens, "auc");
  auto [pos, neg] = ClassCounts(tokens);
  if (method == AucMethod::kEqualSpaced) {
    auto pts = roc_points(tokens, EqualSpacedThresholds(thresholds));
    // Ascending thresholds walk the ROC from (1,1) towards (0,0); close it.
    pts.push_back({std::nextafter(1.0, 2.0), 0.0, 0.0});
    double area = 0.0;
    for (std::size_t i = 1; i < pts.size(); ++i)
      area += (pts[i - 1].fpr - pts[i].fpr) * (pts[i - 1].tpr + pts[i].tpr) / 2.0;
    return area;
  }
  std::vector<std::size_t> order(tokens.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return tokens[a].score < tokens[b].score;
  });
  // Twice the rank sum keeps tied midranks integral.
  std::uint64_t twice_rank_sum = 0;
  std::size_t i = 0;
  while (i < order.size()) {
    std::size_t j = i;
    while (j + 1 < order.size() &&
           tokens[order[j + 1]].score == tokens[order[i]].score)
      ++j;
    const std::uint64_t twice_mid = (i + 1) + (j + 1);
    for (std::size_t k = i; k <= j; ++k)
      if (tokens[order[k]].label) twice_rank_sum += twice_mid;
    i = j + 1;
  }
  const double u = static_cast<double>(twice_rank_sum) / 2.0 -
                   static_cast<double>(pos) * static_cast<double>(pos + 1) / 2.0;
  return u / (static_cast<double>(pos) * static_cast<double>(neg));
}

double ece(std::span<const ScoredToken> tokens, int bins) {
  RequireBins(bins);
  if (tokens.empty()) return 0.0;
  std::vector<std::vector<double>> acc(bins), conf(bins);
  for (const auto &t : tokens) {
    const std::size_t b = BinOf(t.score, bins);
    acc[b].push_back(t.label);
    conf[b].push_back(t.score);
  }
  double total = 0.0;
  const double n = static_cast<double>(tokens.size());
  for (int b = 0; b < bins; ++b) {
    if (acc[b].empty()) continue;
    const double c = static_cast<double>(acc[b].size());
    total += c / n * std::abs(SortedSum(acc[b]) / c - SortedSum(conf[b]) / c);
  }
  return total;
}

const char *EceUModeName(EceUMode m) {
  return m == EceUMode::kUtteranceMean ? "utterance_mean" : "bin_level";
}

double ece_u(std::span<const UttRecord> utts, int bins, EceUMode mode) {
  RequireBins(bins);
  if (utts.empty()) return 0.0;
  std::vector<std::vector<double>> acc(bins), conf(bins), gap(bins);
  for (const auto &u : utts) {
    if (u.token_count < 1)
      Fail(ErrorKind::kContract, "ece_u: utterance " + u.utt_id + " has no tokens");
    const std::size_t b = BinOf(u.avg_conf, bins);
    acc[b].push_back(u.Accuracy());
    conf[b].push_back(u.avg_conf);
    gap[b].push_back(std::abs(u.Accuracy() - u.avg_conf));
  }
  double total = 0.0;
  const double n = static_cast<double>(utts.size());
  for (int b = 0; b < bins; ++b) {
    if (acc[b].empty()) continue;
    const double c = static_cast<double>(acc[b].size());
    const double term = mode == EceUMode::kUtteranceMean
                            ? SortedSum(gap[b]) / c
                            : std::abs(SortedSum(acc[b]) / c - SortedSum(conf[b]) / c);
    total += c / n * term;
  }
  return total;
}

double rmse_u(std::span<const UttRecord> utts) {
  if (utts.empty()) Fail(ErrorKind::kEmptyInput, "rmse_u over zero utterances");
  std::vector<double> sq;
  sq.reserve(utts.size());
  for (const auto &u : utts) {
    const double d = u.avg_conf - u.Accuracy();
    sq.push_back(d * d);
  }
  return std::sqrt(SortedSum(sq) / static_cast<double>(utts.size()));
}

double corpus_error_rate(std::span<const UttRecord> utts) {
  std::size_t errors = 0, ref = 0;
  for (const auto &u : utts) {
    errors += u.edit_errors;
    ref += u.token_count;
  }
  if (ref == 0) Fail(ErrorKind::kDegenerate, "corpus error rate with no reference tokens");
  return static_cast<double>(errors) / static_cast<double>(ref);
}

std::vector<FilterPoint> filter_curve(std::span<const UttRecord> utts,
                                      std::span<const double> thresholds) {
  if (!std::is_sorted(thresholds.begin(), thresholds.end()))
    Fail(ErrorKind::kContract, "filter_curve thresholds must be ascending");
  std::vector<FilterPoint> out;
  out.reserve(thresholds.size());
  for (double th : thresholds) {
    FilterPoint p;
    p.threshold = th;
    std::size_t errors = 0, ref = 0;
    for (const auto &u : utts)
      if (u.avg_conf >= th) {
        ++p.subset_size;
        errors += u.edit_errors;
        ref += u.token_count;
      }
    if (p.subset_size > 0 && ref > 0)
      p.error_rate = static_cast<double>(errors) / static_cast<double>(ref);
    out.push_back(p);
  }
  return out;
}

std::pair<std::vector<UttRecord>, std::vector<UttRecord>> split_by_deletion(
    std::span<const UttRecord> utts) {
  std::pair<std::vector<UttRecord>, std::vector<UttRecord>> out;
  for (const auto &u : utts) (u.has_deletion ? out.second : out.first).push_back(u);
  return out;
}

nlohmann::json MetricsReport::ToJson() const {
  auto curve = [](const std::vector<FilterPoint> &c) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto &p : c)
      arr.push_back({{"threshold", p.threshold},
                     {"n", p.subset_size},
                     {"error_rate", p.error_rate ? nlohmann::json(*p.error_rate)
                                                 : nlohmann::json(nullptr)}});
    return arr;
  };
  return {{"variant", variant},
          {"auc", auc},
          {"auc_method", AucMethodName(AucMethod::kExactRank)},
          {"auc_equal_spaced", auc_equal_spaced},
          {"ece", ece},
          {"ece_u", ece_u},
          {"ece_u_mode", EceUModeName(ece_u_mode)},
          {"rmse_u", rmse_u},
          {"corpus_cer", corpus_cer},
          {"mean_conf", mean_conf},
          {"n_utts", n_utts},
          {"n_tokens", n_tokens},
          {"bins", bins},
          {"curve_all", curve(curve_all)},
          {"curve_no_deletion", curve(curve_no_deletion)},
          {"curve_deletion", curve(curve_deletion)}};
}

MetricsReport BuildReport(const std::string &variant,
                          std::span<const ScoredToken> tokens,
                          std::span<const UttRecord> utts, int bins,
                          EceUMode mode, std::size_t thresholds) {
  MetricsReport r;
  r.variant = variant;
  r.bins = bins;
  r.ece_u_mode = mode;
  r.n_utts = utts.size();
  r.n_tokens = tokens.size();
  auto [pos, neg] = ClassCounts(tokens);
  if (pos > 0 && neg > 0) {
    r.auc = auc(tokens, AucMethod::kExactRank);
    r.auc_equal_spaced = auc(tokens, AucMethod::kEqualSpaced, thresholds);
  } else {
    r.auc = r.auc_equal_spaced = std::nan("");
  }
  r.ece = ece(tokens, bins);
  r.ece_u = ece_u(utts, bins, mode);
  r.rmse_u = utts.empty() ? 0.0 : rmse_u(utts);
  r.corpus_cer = utts.empty() ? 0.0 : corpus_error_rate(utts);
  std::vector<double> conf;
  for (const auto &u : utts) conf.push_back(u.avg_conf);
  r.mean_conf = utts.empty() ? 0.0 : SortedSum(conf) / static_cast<double>(utts.size());
  const auto th = EqualSpacedThresholds(thresholds);
  r.curve_all = filter_curve(utts, th);
  auto [clean, with_del] = split_by_deletion(utts);
  r.curve_no_deletion = filter_curve(clean, th);
  r.curve_deletion = filter_curve(with_del, th);
  return r;
}

void WriteCurveTsv(std::ostream &os, std::span<const FilterPoint> curve) {
  const auto flags = os.flags();
  os << "threshold\tn\terror_rate\n" << std::setprecision(10);
  for (const auto &p : curve) {
    os << p.threshold << '\t' << p.subset_size << '\t';
    if (p.error_rate) os << *p.error_rate; else os << "NA";
    os << '\n';
  }
  os.flags(flags);
}

void WriteSummaryTsv(std::ostream &os, std::span<const MetricsReport> reports) {
  const auto flags = os.flags();
  os << "variant\tauc\tauc_equal_spaced\tece\tece_u\trmse_u\tcorpus_cer\tmean_conf"
        "\tn_utts\tn_tokens\n"
     << std::setprecision(10);
  for (const auto &r : reports)
    os << r.variant << '\t' << r.auc << '\t' << r.auc_equal_spaced << '\t' << r.ece
       << '\t' << r.ece_u << '\t' << r.rmse_u << '\t' << r.corpus_cer << '\t'
       << r.mean_conf << '\t' << r.n_utts << '\t' << r.n_tokens << '\n';
  os.flags(flags);
}

}  // namespace cacem
