// core/src/evaluation.cc

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

#include "cacem/evaluation.h"

#include <cmath>
#include <cstdio>
#include <map>

#include "cacem/autograd.h"
#include "cacem/errors.h"
#include "cacem/labeling.h"

namespace cacem {

namespace {

UttRecord MakeRecord(const std::string &id, double avg_conf, const Tokens &judged,
                     const Tokens &ref) {
  EditResult e = edit_distance(ref, judged);
  UttRecord r;
  r.utt_id = id;
  r.avg_conf = avg_conf;
  r.token_count = ref.size();
  r.edit_errors = e.distance;
  r.cer = static_cast<double>(e.distance) / static_cast<double>(ref.size());
  r.has_deletion = e.path.deletions() > 0;
  return r;
}

void AppendRows(VariantEvaluation &v, const std::string &id,
                const ConfidenceResult &conf, const std::vector<int> &labels) {
  for (std::size_t i = 0; i < conf.tokens.size(); ++i)
    v.rows.push_back({id, v.variant, i, conf.tokens[i], conf.scores[i], labels[i]});
}

std::string Fixed(double x, int digits) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.*f", digits, x);
  return buf;
}

}  // namespace

std::vector<ScoredToken> VariantEvaluation::Tokens() const {
  std::vector<ScoredToken> out;
  out.reserve(rows.size());
  for (const auto &r : rows) out.push_back({r.score, r.label});
  return out;
}

const VariantEvaluation *EvaluationResult::Find(ConfidenceVariant v) const {
  for (const auto &e : variants)
    if (e.variant == v) return &e;
  return nullptr;
}

EvaluationResult evaluate(const EvaluationModels &models, const Corpus &test,
                          const EvaluateOptions &options) {
  if (!models.base && !models.hyp_synchronous && !models.cif_aligned)
    Fail(ErrorKind::kUsage, "evaluate: no model given");
  if (models.hyp_synchronous &&
      models.hyp_synchronous->cem_variant() != CemVariant::kHypSynchronous)
    Fail(ErrorKind::kContract, "evaluate: hyp_synchronous model carries a different head");
  if (models.cif_aligned && models.cif_aligned->cem_variant() != CemVariant::kCifAligned)
    Fail(ErrorKind::kContract, "evaluate: cif_aligned model carries a different head");

  EvaluationResult result;
  VariantEvaluation soft{ConfidenceVariant::kSoftmax, {}, {}, {}};
  VariantEvaluation aed{ConfidenceVariant::kHypSynchronous, {}, {}, {}};
  VariantEvaluation ca{ConfidenceVariant::kCifAligned, {}, {}, {}};
  std::size_t hyp_errors = 0, ref_tokens = 0;

  NoGradScope no_grad;
  ForwardContext eval;
  for (const auto &u : test.utts) {
    if (!u.hyp) Fail(ErrorKind::kData, "evaluate: utterance " + u.id + " has no hypothesis");
    if (u.ref.empty()) Fail(ErrorKind::kData, "evaluate: utterance " + u.id + " has an empty reference");
    const Tokens &hyp = *u.hyp;
    if (hyp.empty()) {
      result.skipped.push_back(u.id);
      continue;
    }
    const DenseMatrix frames = test.Frames(u, options.noise_sigma);

    std::optional<ConfidenceResult> soft_conf, aed_conf, ca_conf;
    bool forced = false;
    if (models.base) {
      AsrDecode dec = models.base->asr_decode(frames);
      forced = dec.tokens.size() == hyp.size();
      soft_conf = models.base->softmax_confidence(
          frames, forced ? SoftmaxMode::kForced : SoftmaxMode::kDecode,
          forced ? std::span<const int>(hyp) : std::span<const int>());
      if (soft_conf->tokens.empty()) {
        result.skipped.push_back(u.id);
        continue;
      }
    }
    if (models.cif_aligned) {
      AcousticState state = models.cif_aligned->acoustics(frames, eval, std::nullopt);
      if (state.fired.trace.count() == 0) {
        result.skipped.push_back(u.id);
        continue;
      }
      CaCemOutput out = models.cif_aligned->ca_cem_forward(state, hyp, eval);
      const std::size_t decode_len = models.cif_aligned->asr_decode(state).tokens.size();
      if (out.scores->value.rows() != decode_len)
        Fail(ErrorKind::kContract, "evaluate: CIF-aligned scores for " + u.id +
                                       " do not match the decode length");
      std::vector<double> scores(out.scores->value.values().begin(),
                                 out.scores->value.values().end());
      ca_conf = ConfidenceResult::Make(std::move(out.tokens), std::move(scores),
                                       ConfidenceVariant::kCifAligned);
    }
    if (models.hyp_synchronous)
      aed_conf = models.hyp_synchronous->aed_cem_forward(frames, hyp);

    EditResult hyp_edit = edit_distance(u.ref, hyp);
    hyp_errors += hyp_edit.distance;
    ref_tokens += u.ref.size();

    if (soft_conf) {
      // Decode-mode scores sit on decode positions and are judged against
      // the hypothesis, the same way as the CIF-aligned head.
      AppendRows(soft, u.id, *soft_conf,
                 forced ? labels_for_hypothesis(hyp, u.ref).labels
                        : labels_for_decode(soft_conf->tokens, hyp).labels);
      soft.utts.push_back(MakeRecord(u.id, soft_conf->average, hyp, u.ref));
    }
    if (aed_conf) {
      AppendRows(aed, u.id, *aed_conf, labels_for_hypothesis(hyp, u.ref).labels);
      aed.utts.push_back(MakeRecord(u.id, aed_conf->average, hyp, u.ref));
    }
    if (ca_conf) {
      AppendRows(ca, u.id, *ca_conf, labels_for_decode(ca_conf->tokens, hyp).labels);
      ca.utts.push_back(MakeRecord(u.id, ca_conf->average, hyp, u.ref));
    }
  }
  result.hyp_cer =
      ref_tokens ? static_cast<double>(hyp_errors) / static_cast<double>(ref_tokens) : 0.0;

  auto finish = [&](VariantEvaluation &v, bool present) {
    if (!present) return;
    if (v.utts.empty())
      Fail(ErrorKind::kDegenerate, std::string("evaluate: no utterances scored for ") +
                                       ConfidenceVariantName(v.variant));
    const auto tokens = v.Tokens();
    try {
      v.report = BuildReport(ConfidenceVariantName(v.variant), tokens, v.utts,
                             options.bins, options.ece_u_mode, options.thresholds);
    } catch (const Error &e) {
      throw Error(e.kind(), std::string(ConfidenceVariantName(v.variant)) + ": " + e.what());
    }
    result.variants.push_back(std::move(v));
  };
  finish(soft, models.base != nullptr);
  finish(aed, models.hyp_synchronous != nullptr);
  finish(ca, models.cif_aligned != nullptr);
  return result;
}

CaseStudy case_study(const EvaluationModels &models, const Corpus &corpus,
                     const std::string &utt_id) {
  const Utterance *u = corpus.Find(utt_id);
  if (!u) Fail(ErrorKind::kNotFound, "case study: no utterance " + utt_id);
  return case_study(models, corpus, *u);
}

CaseStudy case_study(const EvaluationModels &models, const Corpus &corpus,
                     const Utterance &utt) {
  if (!utt.hyp || utt.hyp->empty())
    Fail(ErrorKind::kData, "case study: utterance " + utt.id + " has no hypothesis");
  const Tokens &ref = utt.ref;
  const Tokens &hyp = *utt.hyp;
  const DenseMatrix frames = corpus.Frames(utt);
  const AlignmentPath path = edit_distance(ref, hyp).path;

  CaseStudy cs;
  cs.utt_id = utt.id;
  cs.accuracy = 1.0 - std::min(cer(hyp, ref), 1.0);

  CaseStudyRow gt{"ground_truth", {}, "-"};
  CaseStudyRow hy{"hypothesis", {}, "acc=" + Fixed(100.0 * cs.accuracy, 1) + "%"};
  for (const auto &op : path.ops) {
    gt.cells.push_back(op.ref_index ? std::to_string(ref[*op.ref_index]) : "**");
    hy.cells.push_back(op.hyp_index ? std::to_string(hyp[*op.hyp_index]) : "**");
  }
  cs.rows.push_back(std::move(gt));
  cs.rows.push_back(std::move(hy));

  // Scores of the hypothesis itself sit in hypothesis columns; scores of
  // another sequence go to the reference slot that sequence aligns with.
  auto row_for = [&](const std::string &name, const ConfidenceResult &conf) {
    CaseStudyRow row{name, {}, "avg=" + Fixed(conf.average, 3)};
    if (conf.tokens == hyp) {
      for (const auto &op : path.ops)
        row.cells.push_back(op.hyp_index ? Fixed(conf.scores[*op.hyp_index], 3) : "**");
    } else {
      std::map<std::size_t, std::size_t> at_ref;
      for (const auto &op : edit_distance(ref, conf.tokens).path.ops)
        if (op.ref_index && op.hyp_index) at_ref[*op.ref_index] = *op.hyp_index;
      for (const auto &op : path.ops) {
        auto it = op.ref_index ? at_ref.find(*op.ref_index) : at_ref.end();
        row.cells.push_back(it != at_ref.end() ? Fixed(conf.scores[it->second], 3) : "**");
      }
    }
    return row;
  };

  if (models.base) {
    AsrDecode dec = models.base->asr_decode(frames);
    const bool forced = dec.tokens.size() == hyp.size();
    ConfidenceResult conf = models.base->softmax_confidence(
        frames, forced ? SoftmaxMode::kForced : SoftmaxMode::kDecode,
        forced ? std::span<const int>(hyp) : std::span<const int>());
    if (!conf.tokens.empty()) cs.rows.push_back(row_for("softmax", conf));
    cs.results.push_back(std::move(conf));
  }
  if (models.hyp_synchronous) {
    ConfidenceResult conf = models.hyp_synchronous->aed_cem_forward(frames, hyp);
    cs.rows.push_back(row_for("hyp_synchronous", conf));
    cs.results.push_back(std::move(conf));
  }
  if (models.cif_aligned) {
    NoGradScope no_grad;
    AcousticState state =
        models.cif_aligned->acoustics(frames, ForwardContext{}, std::nullopt);
    cs.trace = state.fired.trace;
    ConfidenceResult conf = models.cif_aligned->ca_cem_forward(frames, hyp);
    cs.rows.push_back(row_for("cif_aligned", conf));
    cs.results.push_back(std::move(conf));
  }
  return cs;
}

std::vector<NoiseSweepRow> noise_sweep(const Model &cif_aligned, const Corpus &test,
                                       const std::vector<double> &sigmas) {
  if (cif_aligned.cem_variant() != CemVariant::kCifAligned)
    Fail(ErrorKind::kContract, "noise_sweep needs a CIF-aligned checkpoint");
  for (std::size_t i = 1; i < sigmas.size(); ++i)
    if (!(sigmas[i] > sigmas[i - 1]))
      Fail(ErrorKind::kContract, "noise_sweep: sigmas must be ascending");

  NoGradScope no_grad;
  ForwardContext eval;
  std::vector<NoiseSweepRow> rows;
  for (double sigma : sigmas) {
    NoiseSweepRow row;
    row.sigma = sigma;
    std::size_t errors = 0, ref_tokens = 0;
    double gt_total = 0.0, hyp_total = 0.0;
    for (const auto &u : test.utts) {
      AcousticState state = cif_aligned.acoustics(test.Frames(u, sigma), eval, std::nullopt);
      const Tokens decode = cif_aligned.asr_decode(state).tokens;
      errors += edit_distance(u.ref, decode).distance;
      ref_tokens += u.ref.size();
      if (decode.empty()) {
        ++row.empty_decodes;
        continue;
      }
      auto average = [](const Var &scores) {
        double s = 0.0;
        for (double x : scores->value.values()) s += x;
        return s / static_cast<double>(scores->value.size());
      };
      gt_total += average(cif_aligned.ca_cem_forward(state, u.ref, eval).scores);
      hyp_total += average(cif_aligned.ca_cem_forward(state, decode, eval).scores);
      ++row.n_utts;
    }
    row.cer = ref_tokens ? static_cast<double>(errors) / static_cast<double>(ref_tokens) : 0.0;
    if (row.n_utts > 0) {
      row.conf_gt = gt_total / static_cast<double>(row.n_utts);
      row.conf_hyp = hyp_total / static_cast<double>(row.n_utts);
    }
    rows.push_back(row);
  }
  return rows;
}

}  // namespace cacem
