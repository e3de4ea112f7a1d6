// core/src/experiment.cc

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

#include "cacem/experiment.h"

#include <chrono>
#include <cmath>
#include <cstdio>

#include "cacem/errors.h"
#include "cacem/labeling.h"

namespace cacem {

namespace {

nlohmann::json PlanToJson(const CorruptionPlan &p) {
  return {{"min_rate", p.min_rate}, {"max_rate", p.max_rate}, {"sub_share", p.sub_share},
          {"del_share", p.del_share}, {"ins_share", p.ins_share}};
}

CorruptionPlan PlanFromJson(const nlohmann::json &j) {
  CorruptionPlan p;
  p.min_rate = j.value("min_rate", p.min_rate);
  p.max_rate = j.value("max_rate", p.max_rate);
  p.sub_share = j.value("sub_share", p.sub_share);
  p.del_share = j.value("del_share", p.del_share);
  p.ins_share = j.value("ins_share", p.ins_share);
  return p;
}

void Report(const ProgressFn &progress, const std::string &msg) {
  if (progress) progress(msg);
}

std::string Format(const char *fmt, double a, double b = 0.0) {
  char buf[128];
  std::snprintf(buf, sizeof(buf), fmt, a, b);
  return buf;
}

}  // namespace

void ExperimentConfig::Validate() const {
  corpus.Validate();
  model.Validate();
  base_optim.Validate();
  cem.optim.Validate();
  if (n_train == 0 || n_train >= static_cast<std::size_t>(corpus.n_utts))
    Fail(ErrorKind::kContract, "n_train must leave a non-empty held-out split");
  if (model.vocab_size != corpus.vocab_size || model.feature_dim != corpus.feature_dim)
    Fail(ErrorKind::kContract, "model and corpus disagree on vocab_size / feature_dim");
  if (snapshot_every < 0) Fail(ErrorKind::kContract, "snapshot_every must be >= 0");
}

nlohmann::json ExperimentConfig::ToJson() const {
  return {{"corpus", corpus.ToJson()},
          {"n_train", n_train},
          {"model", model.ToJson()},
          {"optim", base_optim.ToJson()},
          {"quantity_weight", quantity_weight},
          {"cem",
           {{"optim", cem.optim.ToJson()},
            {"seed", cem.seed},
            {"decode_keep_weight", cem.decode_keep_weight},
            {"corruption", PlanToJson(train_corruption)},
            {"redraw_hypotheses", redraw_hypotheses}}},
          {"test_targets", test_targets},
          {"target_tolerance", target_tolerance},
          {"snapshot_every", snapshot_every},
          {"snapshot_until", snapshot_until},
          {"seed", seed}};
}

ExperimentConfig ExperimentConfig::FromJson(const nlohmann::json &j) {
  ExperimentConfig c;
  if (j.contains("corpus")) c.corpus = CorpusSpec::FromJson(j["corpus"]);
  c.n_train = j.value("n_train", c.n_train);
  if (j.contains("model")) c.model = ModelConfig::FromJson(j["model"]);
  if (j.contains("optim")) c.base_optim = OptimConfig::FromJson(j["optim"], c.base_optim);
  c.quantity_weight = j.value("quantity_weight", c.quantity_weight);
  if (j.contains("cem")) {
    const auto &cj = j["cem"];
    if (cj.contains("optim")) c.cem.optim = OptimConfig::FromJson(cj["optim"], c.cem.optim);
    c.cem.seed = cj.value("seed", c.cem.seed);
    c.cem.decode_keep_weight = cj.value("decode_keep_weight", c.cem.decode_keep_weight);
    if (cj.contains("corruption")) c.train_corruption = PlanFromJson(cj["corruption"]);
    c.redraw_hypotheses = cj.value("redraw_hypotheses", c.redraw_hypotheses);
  }
  c.test_targets = j.value("test_targets", c.test_targets);
  c.target_tolerance = j.value("target_tolerance", c.target_tolerance);
  c.snapshot_every = j.value("snapshot_every", c.snapshot_every);
  c.snapshot_until = j.value("snapshot_until", c.snapshot_until);
  c.seed = j.value("seed", c.seed);
  c.Validate();
  return c;
}

ExperimentConfig ExperimentConfig::WithSeed(std::uint64_t s) const {
  ExperimentConfig c = *this;
  c.seed = s;
  c.corpus.seed = DeriveSeed(s, 11);
  c.corpus.prototype_seed = DeriveSeed(s, 12);
  c.cem.seed = DeriveSeed(s, 13);
  return c;
}

std::string TestSetName(double target) {
  return "test" + std::to_string(static_cast<int>(std::lround(target * 100.0)));
}

TestSet BuildTestSet(const Corpus &heldout, const std::vector<SnapshotDecode> &snapshots,
                     double target, double tolerance, std::uint64_t seed) {
  TestSet set;
  set.name = TestSetName(target);
  set.target_cer = target;
  const SnapshotDecode *best = nullptr;
  for (const auto &s : snapshots)
    if (!best || std::abs(s.decode.corpus_cer - target) < std::abs(best->decode.corpus_cer - target))
      best = &s;
  if (best && std::abs(best->decode.corpus_cer - target) <= tolerance) {
    set.corpus = WithHypotheses(heldout, best->decode);
    set.cer = best->decode.corpus_cer;
    set.source = "checkpoint@" + std::to_string(best->step);
    return set;
  }
  // Total rate split like the training corruption; expected CER ~ target.
  set.corpus = heldout;
  AttachCorruptedHypotheses(set.corpus, CorruptionRates{0.5 * target, 0.25 * target, 0.25 * target},
                            DeriveSeed(seed, static_cast<std::uint64_t>(std::lround(target * 1000))));
  std::size_t errors = 0, ref = 0;
  for (const auto &u : set.corpus.utts) {
    errors += edit_distance(u.ref, *u.hyp).distance;
    ref += u.ref.size();
  }
  set.cer = ref ? static_cast<double>(errors) / static_cast<double>(ref) : 0.0;
  set.source = "corruption";
  return set;
}

const TestSet &ExperimentArtifacts::Set(const std::string &name) const {
  for (const auto &s : test_sets)
    if (s.name == name) return s;
  Fail(ErrorKind::kNotFound, "no test set " + name);
}

ExperimentArtifacts run_experiment(const ExperimentConfig &config,
                                   const ProgressFn &progress, bool train_heads) {
  config.Validate();
  ExperimentArtifacts out;
  Corpus all = gen_corpus(config.corpus);
  std::tie(out.train, out.test) = all.Split(config.n_train);

  BaseTrainConfig base;
  base.model = config.model;
  base.optim = config.base_optim;
  base.seed = config.seed;
  base.quantity_weight = config.quantity_weight;
  base.snapshot_every = config.snapshot_every;
  base.on_snapshot = [&](int step, const Model &model) {
    if (step > config.snapshot_until) return;
    out.snapshots.push_back({step, decode_corpus(model, out.test)});
    Report(progress, "snapshot " + std::to_string(step) +
                         Format(": held-out CER %.4f", out.snapshots.back().decode.corpus_cer));
  };
  const auto t0 = std::chrono::steady_clock::now();
  out.base = train_base(out.train, base);
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  out.base_seconds = secs;
  out.base_decode = decode_corpus(out.base->model, out.test);
  Report(progress, Format("base model: %.1f s, held-out CER %.4f", secs,
                          out.base_decode.corpus_cer));

  for (double target : config.test_targets) {
    out.test_sets.push_back(BuildTestSet(out.test, out.snapshots, target,
                                         config.target_tolerance, config.seed));
    const TestSet &s = out.test_sets.back();
    Report(progress, s.name + " from " + s.source + Format(", CER %.4f", s.cer));
  }
  if (!train_heads) return out;

  Corpus cem_train = out.train;
  AttachCorruptedHypotheses(cem_train, config.train_corruption, DeriveSeed(config.seed, 21));
  for (CemVariant v : {CemVariant::kCifAligned, CemVariant::kHypSynchronous}) {
    CemTrainConfig cem = config.cem;
    cem.variant = v;
    if (config.redraw_hypotheses) cem.redraw = config.train_corruption;
    const auto t1 = std::chrono::steady_clock::now();
    CemTrainResult r = train_cem(out.base->model, cem_train, cem);
    const double s =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t1).count();
    Report(progress, std::string(CemVariantName(v)) +
                         Format(" head: %.1f s, final loss %.4f", s, r.log.back().loss));
    (v == CemVariant::kCifAligned ? out.cif_aligned : out.hyp_synchronous) = std::move(r);
  }
  return out;
}

}  // namespace cacem
